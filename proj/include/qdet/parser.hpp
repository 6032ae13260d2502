#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdet/relational.hpp"

namespace qdet {

struct SourceFile {
    std::string text;
    std::string path = "<input>";
};

enum class Severity { Error, Warning };

struct ParseDiagnostic {
    Severity severity = Severity::Error;
    std::string message;
    std::size_t line = 1;   // 1-based
    std::size_t column = 1; // 1-based

    bool operator==(const ParseDiagnostic&) const = default;
};

/// Renders "path:line:col: severity: message".
std::string format_diagnostic(const ParseDiagnostic& d, std::string_view path);

struct Problem {
    Schema schema;
    std::vector<ViewDef> views;
    QueryDef query;

    bool operator==(const Problem&) const = default;
};

struct ParseResult {
    std::optional<Problem> problem;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const { return problem.has_value(); }
    bool has_errors() const;
};

/// Parses the .qdet DSL:
///
///   problem  := decl*
///   decl     := relation | view | query
///   relation := "relation" NAME "(" col ("," col)* ")" ";"
///   col      := NAME ":" ("uninterpreted" | "int" | "bool" | "string")
///   view     := "view" NAME "=" "project" colrefs "where" pred "from" NAME ";"
///   query    := "query" "project" colrefs "where" pred "from" NAME ("," NAME)* ";"
///   colrefs  := colref ("," colref)*
///   colref   := NAME "." NAME
///   pred     := disj; disj := conj ("or" conj)*; conj := neg ("and" neg)*
///   neg      := "not" neg | "true" | "false" | "(" pred ")" | term cmp term
///   cmp      := "=" | "<" | "<="
///   term     := colref | INT | STRING | "#" INT | "true" | "false"
///
/// "//" starts a line comment. Exactly one query per file; a view may
/// reference only its source relation; the query must join every declared
/// relation exactly once.
ParseResult parse_problem(const SourceFile& src);

/// Canonical DSL text; parse_problem(to_dsl(p)) is structurally equal to p.
std::string to_dsl(const Problem& p);

std::string predicate_to_dsl(const Predicate& p);

} // namespace qdet
