#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace cgf {

// Append-only ragged array. Rows live in fixed-capacity blocks that are never
// reallocated, so growth never copies and spare capacity stays a small
// fraction of what is stored.
template <class T>
class RowStore {
public:
    RowStore() = default;
    RowStore(RowStore&&) noexcept = default;
    RowStore& operator=(RowStore&&) noexcept = default;
    // Copies are compacted into a single block.
    RowStore(const RowStore& other) {
        reserve(other.rows(), other.size());
        for (std::size_t r = 0; r < other.rows(); ++r) {
            append(other.row(r));
        }
    }
    RowStore& operator=(const RowStore& other) {
        if (this != &other) {
            RowStore copy(other);
            *this = std::move(copy);
        }
        return *this;
    }

    std::size_t rows() const { return rows_.size(); }
    std::size_t size() const { return size_; }

    std::span<const T> row(std::size_t r) const { return {rows_[r].begin, rows_[r].length}; }

    void reserve(std::size_t rows, std::size_t entries) {
        rows_.reserve(rows);
        if (blocks_.empty() && entries > 0) {
            open_block(entries);
        }
    }

    void append(std::span<const T> items) {
        if (blocks_.empty() || blocks_.back().capacity() - blocks_.back().size() < items.size()) {
            open_block(std::max(items.size(), next_capacity()));
        }
        auto& b = blocks_.back();
        const T* start = b.data() + b.size();
        b.insert(b.end(), items.begin(), items.end());
        rows_.push_back({start, items.size()});
        size_ += items.size();
    }

    std::size_t memory_bytes() const {
        std::size_t bytes = rows_.capacity() * sizeof(Row);
        for (const auto& b : blocks_) {
            bytes += b.capacity() * sizeof(T);
        }
        return bytes;
    }

private:
    static constexpr std::size_t min_block = 1024;
    static constexpr std::size_t max_block = 32768;

    std::size_t next_capacity() const { return std::clamp(size_ / 16, min_block, max_block); }

    void open_block(std::size_t capacity) {
        blocks_.emplace_back();
        blocks_.back().reserve(capacity);
    }

    // Pointer and length side by side: one cache line per row lookup.
    struct Row {
        const T* begin;
        std::size_t length;
    };

    std::vector<std::vector<T>> blocks_;
    std::vector<Row> rows_;
    std::size_t size_ = 0;
};

} // namespace cgf
