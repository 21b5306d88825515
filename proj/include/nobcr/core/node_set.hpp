#pragma once

#include <array>
#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace nobcr {

/// Dense node identifier, 0..N-1 within a scenario.
using NodeId = std::uint32_t;

inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

/**
 * Fixed-capacity bitset over node identifiers.
 *
 * All neighborhood algebra (1-hop and 2-hop sets, cover targets, receiver
 * estimates) is expressed with this type, so every set operation is a short
 * loop over machine words with no allocation.
 */
template <std::size_t MaxNodes>
class BasicNodeSet {
    static_assert(MaxNodes > 0 && MaxNodes % 64 == 0, "capacity must be a multiple of 64");

public:
    static constexpr std::size_t kCapacity = MaxNodes;
    static constexpr std::size_t kWords = MaxNodes / 64;

    constexpr BasicNodeSet() = default;

    BasicNodeSet(std::initializer_list<NodeId> ids) {
        for (NodeId id : ids) insert(id);
    }

    static BasicNodeSet range(NodeId first, NodeId last_exclusive) {
        BasicNodeSet s;
        for (NodeId i = first; i < last_exclusive; ++i) s.insert(i);
        return s;
    }

    void insert(NodeId id) {
        assert(id < MaxNodes);
        words_[id >> 6] |= (std::uint64_t{1} << (id & 63));
    }

    void erase(NodeId id) {
        assert(id < MaxNodes);
        words_[id >> 6] &= ~(std::uint64_t{1} << (id & 63));
    }

    [[nodiscard]] bool contains(NodeId id) const {
        if (id >= MaxNodes) return false;
        return (words_[id >> 6] >> (id & 63)) & 1U;
    }

    [[nodiscard]] std::size_t size() const {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    [[nodiscard]] bool empty() const {
        for (auto w : words_)
            if (w != 0) return false;
        return true;
    }

    void clear() { words_.fill(0); }

    BasicNodeSet& operator|=(const BasicNodeSet& o) {
        for (std::size_t i = 0; i < kWords; ++i) words_[i] |= o.words_[i];
        return *this;
    }
    BasicNodeSet& operator&=(const BasicNodeSet& o) {
        for (std::size_t i = 0; i < kWords; ++i) words_[i] &= o.words_[i];
        return *this;
    }
    /// Set difference.
    BasicNodeSet& operator-=(const BasicNodeSet& o) {
        for (std::size_t i = 0; i < kWords; ++i) words_[i] &= ~o.words_[i];
        return *this;
    }

    friend BasicNodeSet operator|(BasicNodeSet a, const BasicNodeSet& b) { return a |= b; }
    friend BasicNodeSet operator&(BasicNodeSet a, const BasicNodeSet& b) { return a &= b; }
    friend BasicNodeSet operator-(BasicNodeSet a, const BasicNodeSet& b) { return a -= b; }
    friend bool operator==(const BasicNodeSet&, const BasicNodeSet&) = default;

    [[nodiscard]] bool is_subset_of(const BasicNodeSet& o) const {
        for (std::size_t i = 0; i < kWords; ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }

    [[nodiscard]] bool intersects(const BasicNodeSet& o) const {
        for (std::size_t i = 0; i < kWords; ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }

    /// |this ∩ o| without materializing the intersection.
    [[nodiscard]] std::size_t intersection_size(const BasicNodeSet& o) const {
        std::size_t n = 0;
        for (std::size_t i = 0; i < kWords; ++i)
            n += static_cast<std::size_t>(std::popcount(words_[i] & o.words_[i]));
        return n;
    }

    /// Visits members in ascending id order.
    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t i = 0; i < kWords; ++i) {
            std::uint64_t w = words_[i];
            while (w != 0) {
                const int bit = std::countr_zero(w);
                fn(static_cast<NodeId>(i * 64 + static_cast<std::size_t>(bit)));
                w &= w - 1;
            }
        }
    }

    [[nodiscard]] std::vector<NodeId> to_vector() const {
        std::vector<NodeId> out;
        out.reserve(size());
        for_each([&](NodeId id) { out.push_back(id); });
        return out;
    }

    [[nodiscard]] std::string to_string() const {
        std::string s = "{";
        bool first = true;
        for_each([&](NodeId id) {
            if (!first) s += ',';
            s += std::to_string(id);
            first = false;
        });
        return s + "}";
    }

    [[nodiscard]] std::size_t hash() const {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (auto w : words_) h = (h ^ std::hash<std::uint64_t>{}(w)) * 0x100000001b3ULL;
        return h;
    }

private:
    std::array<std::uint64_t, kWords> words_{};
};

inline constexpr std::size_t kMaxNodes = 512;
using NodeSet = BasicNodeSet<kMaxNodes>;

}  // namespace nobcr
