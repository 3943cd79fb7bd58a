#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace psym {

using SymbolId = std::uint32_t;

enum class SymbolKind { Time, State, Param, Input, Unknown };

std::string_view to_string(SymbolKind kind);

struct Symbol {
    SymbolId id = 0;
    std::string name;
    SymbolKind kind = SymbolKind::Unknown;
};

// Append-only registry of symbols. Ids are dense and assigned in insertion
// order. Reads may run concurrently with appends.
class SymbolTable {
public:
    SymbolTable() = default;
    SymbolTable(const SymbolTable& other);
    SymbolTable& operator=(const SymbolTable&) = delete;

    // Throws AlgebraError if the name is taken.
    SymbolId add(std::string name, SymbolKind kind);

    // Returns the id of an existing symbol with this name and kind, or
    // creates it. Used for unknowns (chi placeholders, ansatz coefficients).
    SymbolId intern(const std::string& name, SymbolKind kind);

    // Creates a new symbol whose name starts with `hint`, suffixing
    // underscores until the name is unused.
    SymbolId fresh(const std::string& hint, SymbolKind kind);

    std::optional<SymbolId> find(std::string_view name) const;
    const Symbol& at(SymbolId id) const;
    const std::string& name(SymbolId id) const { return at(id).name; }
    SymbolKind kind(SymbolId id) const { return at(id).kind; }
    std::size_t size() const;

private:
    mutable std::shared_mutex mutex_;
    std::deque<Symbol> symbols_;
    std::unordered_map<std::string, SymbolId> by_name_;
};

}  // namespace psym
