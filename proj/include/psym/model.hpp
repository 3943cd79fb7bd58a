#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "psym/ratfunc.hpp"

namespace psym {

struct OutputDef {
    std::string name;
    RationalFunction expr;
};

// dx/dt = f(x, theta, u), y = h(x, theta, u).
//
// Symbol ids are assigned in a fixed order: the time symbol t, then states,
// parameters and inputs, each in declaration order. Unknown symbols created
// later by the analysis are appended to the same table.
struct ModelDef {
    std::string name;
    std::shared_ptr<SymbolTable> table;
    SymbolId time = 0;
    std::vector<SymbolId> states;
    std::vector<SymbolId> params;
    std::vector<SymbolId> inputs;
    std::map<SymbolId, RationalFunction> dynamics;
    std::vector<OutputDef> outputs;

    const SymbolTable& symbols() const { return *table; }
    const RationalFunction& rhs(SymbolId state) const { return dynamics.at(state); }
    // States followed by parameters: the coordinates a generator acts on.
    std::vector<SymbolId> coordinates() const;
    std::size_t state_index(SymbolId s) const;
    std::size_t param_index(SymbolId p) const;
    bool is_state(SymbolId s) const;
    bool is_param(SymbolId s) const;
    bool is_input(SymbolId s) const;
    std::optional<SymbolId> find(std::string_view name) const { return table->find(name); }
    SymbolId symbol(std::string_view name) const;
};

// Compares declarations by name and expressions structurally.
bool operator==(const ModelDef& a, const ModelDef& b);

// Parses the model DSL:
//   model <ident>
//   states <ident>(, <ident>)*
//   params <ident>(, <ident>)*
//   inputs <ident>(, <ident>)*          (optional)
//   d<state>/dt = <expr>                (one per state)
//   output <ident> = <expr>             (at least one)
// Expressions use + - * / ^ with integer exponents, parentheses and
// integer or decimal literals; '#' starts a comment.
// Throws ParseError naming the offending token.
ModelDef parse_model(std::string_view text);

// Parses a single expression over the symbols already in `table`.
RationalFunction parse_expression(std::string_view text, const SymbolTable& table);

// DSL text that parses back to an equal model.
std::string print_model(const ModelDef& m);

// {name, states[], params[], inputs[], dynamics{state: expr}, outputs{name: expr}}
nlohmann::ordered_json export_model(const ModelDef& m);
ModelDef import_model(const nlohmann::ordered_json& doc);

ModelDef load_model_file(const std::string& path);

enum class FixtureId { Decay, Linear, Glucose, Sei };

struct FixtureInfo {
    FixtureId id;
    std::string_view key;       // "decay", ...
    std::string_view filename;  // "decay.psm", ...
};

const std::vector<FixtureInfo>& fixture_list();
std::string_view fixture_text(FixtureId id);
ModelDef load_fixture(FixtureId id);
std::optional<FixtureId> fixture_from_key(std::string_view key);
// Directory holding the bundled .psm files.
std::string fixture_directory();

}  // namespace psym
