#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "basketlab/error.hpp"

namespace basketlab {

// Ordered, duplicate-free list of item codes. Positions are stable for the
// life of a pipeline run and serve as the tie-break order everywhere.
class ItemCatalog {
public:
    ItemCatalog() = default;

    explicit ItemCatalog(std::vector<std::string> codes) {
        for (auto& c : codes) add(std::move(c));
    }

    std::uint32_t add(std::string code) {
        if (index_.count(code) != 0)
            throw Error::data("duplicate item code '" + code + "'");
        const auto idx = static_cast<std::uint32_t>(codes_.size());
        index_.emplace(code, idx);
        codes_.push_back(std::move(code));
        return idx;
    }

    // Existing position, or a new one in first-appearance order.
    std::uint32_t intern(const std::string& code) {
        auto it = index_.find(code);
        if (it != index_.end()) return it->second;
        return add(code);
    }

    std::optional<std::uint32_t> find(const std::string& code) const {
        auto it = index_.find(code);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& code(std::uint32_t idx) const { return codes_.at(idx); }
    const std::vector<std::string>& codes() const { return codes_; }
    std::uint32_t size() const { return static_cast<std::uint32_t>(codes_.size()); }
    bool empty() const { return codes_.empty(); }

    friend bool operator==(const ItemCatalog& a, const ItemCatalog& b) {
        return a.codes_ == b.codes_;
    }

private:
    std::vector<std::string> codes_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

} // namespace basketlab
