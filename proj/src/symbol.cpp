#include "psym/symbol.hpp"

#include <mutex>

#include "psym/errors.hpp"

namespace psym {

std::string_view to_string(SymbolKind kind) {
    switch (kind) {
        case SymbolKind::Time: return "time";
        case SymbolKind::State: return "state";
        case SymbolKind::Param: return "param";
        case SymbolKind::Input: return "input";
        case SymbolKind::Unknown: return "unknown";
    }
    return "unknown";
}

SymbolTable::SymbolTable(const SymbolTable& other) {
    std::shared_lock lock(other.mutex_);
    symbols_ = other.symbols_;
    by_name_ = other.by_name_;
}

SymbolId SymbolTable::add(std::string name, SymbolKind kind) {
    std::unique_lock lock(mutex_);
    if (by_name_.count(name)) throw AlgebraError("duplicate symbol '" + name + "'");
    const auto id = static_cast<SymbolId>(symbols_.size());
    by_name_.emplace(name, id);
    symbols_.push_back(Symbol{id, std::move(name), kind});
    return id;
}

SymbolId SymbolTable::intern(const std::string& name, SymbolKind kind) {
    std::unique_lock lock(mutex_);
    if (auto it = by_name_.find(name); it != by_name_.end()) {
        if (symbols_[it->second].kind != kind)
            throw AlgebraError("symbol '" + name + "' already exists with a different kind");
        return it->second;
    }
    const auto id = static_cast<SymbolId>(symbols_.size());
    by_name_.emplace(name, id);
    symbols_.push_back(Symbol{id, name, kind});
    return id;
}

SymbolId SymbolTable::fresh(const std::string& hint, SymbolKind kind) {
    std::unique_lock lock(mutex_);
    std::string name = hint;
    while (by_name_.count(name)) name += '_';
    const auto id = static_cast<SymbolId>(symbols_.size());
    by_name_.emplace(name, id);
    symbols_.push_back(Symbol{id, std::move(name), kind});
    return id;
}

std::optional<SymbolId> SymbolTable::find(std::string_view name) const {
    std::shared_lock lock(mutex_);
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

const Symbol& SymbolTable::at(SymbolId id) const {
    std::shared_lock lock(mutex_);
    if (id >= symbols_.size()) throw AlgebraError("unknown symbol id " + std::to_string(id));
    return symbols_[id];
}

std::size_t SymbolTable::size() const {
    std::shared_lock lock(mutex_);
    return symbols_.size();
}

}  // namespace psym
