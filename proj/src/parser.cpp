#include "qdet/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace qdet {

namespace {

enum class Tok {
    Ident,
    IntLit,
    StringLit,
    HashLit, // #n
    LParen,
    RParen,
    Comma,
    Semicolon,
    Colon,
    Dot,
    Equal,
    Less,
    LessEq,
    End,
    Bad,
};

struct Token {
    Tok type = Tok::End;
    std::string text;
    std::int64_t number = 0;
    std::size_t line = 1;
    std::size_t column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run(std::vector<ParseDiagnostic>& diags) {
        std::vector<Token> tokens;
        while (true) {
            skip_space_and_comments();
            Token t = next(diags);
            tokens.push_back(t);
            if (t.type == Tok::End) break;
        }
        return tokens;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        ++pos_;
        ++col_;
    }

    Token make(Tok type, std::string text, std::size_t line, std::size_t col) {
        Token t;
        t.type = type;
        t.text = std::move(text);
        t.line = line;
        t.column = col;
        return t;
    }

    Token next(std::vector<ParseDiagnostic>& diags) {
        std::size_t line = line_, col = col_;
        if (pos_ >= text_.size()) return make(Tok::End, "", line, col);
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string word;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                word += text_[pos_];
                advance();
            }
            return make(Tok::Ident, std::move(word), line, col);
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && pos_ + 1 < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
            std::string digits;
            if (c == '-') {
                digits += c;
                advance();
            }
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                digits += text_[pos_];
                advance();
            }
            Token t = make(Tok::IntLit, digits, line, col);
            t.number = std::stoll(digits);
            return t;
        }
        switch (c) {
            case '#': {
                advance();
                std::string digits;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    digits += text_[pos_];
                    advance();
                }
                if (digits.empty()) {
                    diags.push_back({Severity::Error, "expected digits after '#'", line, col});
                    return make(Tok::Bad, "#", line, col);
                }
                Token t = make(Tok::HashLit, "#" + digits, line, col);
                t.number = std::stoll(digits);
                return t;
            }
            case '"': {
                advance();
                std::string body;
                while (pos_ < text_.size() && text_[pos_] != '"' && text_[pos_] != '\n') {
                    body += text_[pos_];
                    advance();
                }
                if (pos_ >= text_.size() || text_[pos_] != '"') {
                    diags.push_back({Severity::Error, "unterminated string literal", line, col});
                    return make(Tok::Bad, body, line, col);
                }
                advance();
                return make(Tok::StringLit, std::move(body), line, col);
            }
            case '(': advance(); return make(Tok::LParen, "(", line, col);
            case ')': advance(); return make(Tok::RParen, ")", line, col);
            case ',': advance(); return make(Tok::Comma, ",", line, col);
            case ';': advance(); return make(Tok::Semicolon, ";", line, col);
            case ':': advance(); return make(Tok::Colon, ":", line, col);
            case '.': advance(); return make(Tok::Dot, ".", line, col);
            case '=': advance(); return make(Tok::Equal, "=", line, col);
            case '<':
                advance();
                if (pos_ < text_.size() && text_[pos_] == '=') {
                    advance();
                    return make(Tok::LessEq, "<=", line, col);
                }
                return make(Tok::Less, "<", line, col);
            default:
                diags.push_back(
                    {Severity::Error, std::string("unexpected character '") + c + "'", line, col});
                advance();
                return make(Tok::Bad, std::string(1, c), line, col);
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

bool is_keyword(const Token& t, std::string_view word) {
    return t.type == Tok::Ident && t.text == word;
}

const std::set<std::string> kKeywords = {"relation", "view",  "query", "project", "where",
                                         "from",     "and",   "or",    "not",     "true",
                                         "false",    "uninterpreted", "int", "bool", "string"};

struct RefSite {
    ColumnRef ref;
    std::size_t line, column;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, std::vector<ParseDiagnostic>& diags)
        : tokens_(std::move(tokens)), diags_(diags) {}

    ParseResult run() {
        while (!at(Tok::End)) {
            if (is_keyword(peek(), "relation")) {
                parse_relation();
            } else if (is_keyword(peek(), "view")) {
                parse_view();
            } else if (is_keyword(peek(), "query")) {
                parse_query();
            } else {
                error(peek(), "expected 'relation', 'view' or 'query'");
                synchronize();
            }
        }
        if (!saw_query_) error(peek(), "missing query declaration");
        ParseResult result;
        result.diagnostics = diags_;
        bool failed = false;
        for (const auto& d : diags_)
            if (d.severity == Severity::Error) failed = true;
        if (!failed) {
            Problem p;
            p.schema = schema_;
            p.views = views_;
            p.query = query_;
            result.problem = std::move(p);
        }
        return result;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }

    bool at(Tok type) const { return peek().type == type; }

    Token take() {
        Token t = peek();
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return t;
    }

    bool accept(Tok type) {
        if (!at(type)) return false;
        take();
        return true;
    }

    void error(const Token& t, const std::string& message) {
        diags_.push_back({Severity::Error, message, t.line, t.column});
    }

    void warn(const Token& t, const std::string& message) {
        diags_.push_back({Severity::Warning, message, t.line, t.column});
    }

    /// Skips to just past the next ';' so one bad declaration does not
    /// cascade into the rest of the file.
    void synchronize() {
        while (!at(Tok::End) && !accept(Tok::Semicolon)) take();
    }

    bool expect(Tok type, const std::string& what) {
        if (at(type)) {
            take();
            return true;
        }
        error(peek(), "expected " + what);
        return false;
    }

    std::optional<std::string> expect_name(const std::string& what) {
        if (at(Tok::Ident) && !kKeywords.count(peek().text)) return take().text;
        error(peek(), "expected " + what);
        return std::nullopt;
    }

    void parse_relation() {
        take(); // 'relation'
        Token name_tok = peek();
        auto name = expect_name("relation name");
        if (!name) return synchronize();
        if (schema_.relation_index(*name))
            error(name_tok, "duplicate relation name '" + *name + "'");
        RelationDecl decl;
        decl.name = *name;
        if (!expect(Tok::LParen, "'('")) return synchronize();
        do {
            Token col_tok = peek();
            auto col = expect_name("column name");
            if (!col) return synchronize();
            if (!expect(Tok::Colon, "':'")) return synchronize();
            Token sort_tok = take();
            std::optional<Sort> sort;
            if (sort_tok.type == Tok::Ident) {
                if (sort_tok.text == "uninterpreted") sort = Sort::Uninterpreted;
                else if (sort_tok.text == "int") sort = Sort::Int;
                else if (sort_tok.text == "bool") sort = Sort::Bool;
                else if (sort_tok.text == "string") sort = Sort::String;
            }
            if (!sort) {
                error(sort_tok, "expected sort (uninterpreted, int, bool or string)");
                return synchronize();
            }
            if (decl.find_column(*col))
                error(col_tok, "duplicate column '" + *col + "' in relation '" + decl.name + "'");
            decl.columns.push_back({*col, *sort});
        } while (accept(Tok::Comma));
        if (!expect(Tok::RParen, "')'")) return synchronize();
        expect(Tok::Semicolon, "';'");
        schema_.relations.push_back(std::move(decl));
    }

    std::optional<RefSite> parse_colref() {
        Token rel_tok = peek();
        auto rel = expect_name("relation name");
        if (!rel) return std::nullopt;
        if (!expect(Tok::Dot, "'.' (column references are written Relation.Column)"))
            return std::nullopt;
        auto col = expect_name("column name");
        if (!col) return std::nullopt;
        return RefSite{{*rel, *col}, rel_tok.line, rel_tok.column};
    }

    /// Resolves a column reference against the schema, reporting unknown
    /// names. Returns the column sort on success.
    std::optional<Sort> resolve(const RefSite& site) {
        auto idx = schema_.relation_index(site.ref.relation);
        if (!idx) {
            error({Tok::Ident, "", 0, site.line, site.column},
                  "unknown relation '" + site.ref.relation + "'");
            return std::nullopt;
        }
        const ColumnDecl* col = schema_.relations[*idx].find_column(site.ref.column);
        if (!col) {
            error({Tok::Ident, "", 0, site.line, site.column},
                  "unknown column '" + site.ref.column + "' in relation '" + site.ref.relation + "'");
            return std::nullopt;
        }
        return col->sort;
    }

    std::vector<ColumnRef> parse_projection() {
        std::vector<ColumnRef> cols;
        do {
            Token start = peek();
            auto site = parse_colref();
            if (!site) return cols;
            if (resolve(*site)) {
                if (std::find(cols.begin(), cols.end(), site->ref) != cols.end())
                    warn(start, "duplicate column " + to_string(site->ref) + " in projection");
                else
                    cols.push_back(site->ref);
                pred_refs_.push_back(*site);
            }
        } while (accept(Tok::Comma));
        return cols;
    }

    // --- predicate grammar ---

    std::optional<Term> parse_term() {
        Token t = peek();
        switch (t.type) {
            case Tok::IntLit: take(); return Term::val(Value::integer(t.number));
            case Tok::StringLit: take(); return Term::val(Value::text(t.text));
            case Tok::HashLit: take(); return Term::val(Value::uninterpreted(t.number));
            case Tok::Ident:
                if (t.text == "true" || t.text == "false") {
                    take();
                    return Term::val(Value::boolean(t.text == "true"));
                }
                if (auto site = parse_colref()) {
                    if (auto sort = resolve(*site)) {
                        pred_refs_.push_back(*site);
                        return Term::col(site->ref);
                    }
                    return std::nullopt;
                }
                return std::nullopt;
            default:
                error(t, "expected a column reference or constant");
                return std::nullopt;
        }
    }

    std::optional<Sort> term_sort(const Term& t) {
        if (t.kind == Term::Kind::Constant) return t.constant.sort;
        return schema_.column_sort(t.column);
    }

    std::optional<Predicate> parse_comparison() {
        Token start = peek();
        auto lhs = parse_term();
        if (!lhs) return std::nullopt;
        Token op_tok = peek();
        CmpOp op;
        if (accept(Tok::Equal)) op = CmpOp::Eq;
        else if (accept(Tok::Less)) op = CmpOp::Lt;
        else if (accept(Tok::LessEq)) op = CmpOp::Le;
        else {
            error(op_tok, "expected '=', '<' or '<='");
            return std::nullopt;
        }
        auto rhs = parse_term();
        if (!rhs) return std::nullopt;
        auto ls = term_sort(*lhs), rs = term_sort(*rhs);
        if (ls && rs) {
            if (*ls != *rs)
                error(start, std::string("sort mismatch: cannot compare ") +
                                 std::string(sort_name(*ls)) + " with " +
                                 std::string(sort_name(*rs)));
            else if (op != CmpOp::Eq && *ls != Sort::Int)
                error(op_tok, "order comparison requires int operands");
        }
        return Predicate::make_atom(op, std::move(*lhs), std::move(*rhs));
    }

    std::optional<Predicate> parse_primary() {
        const Token& t = peek();
        if (t.type == Tok::LParen) {
            take();
            auto inner = parse_pred();
            if (!inner) return std::nullopt;
            if (!expect(Tok::RParen, "')'")) return std::nullopt;
            return inner;
        }
        if (is_keyword(t, "true") || is_keyword(t, "false")) {
            // A bare boolean is a constant predicate unless a comparison
            // operator follows, in which case it is a bool-valued term.
            Tok after = peek(1).type;
            if (after != Tok::Equal && after != Tok::Less && after != Tok::LessEq) {
                bool val = t.text == "true";
                take();
                return val ? Predicate::make_true() : Predicate::make_false();
            }
        }
        return parse_comparison();
    }

    std::optional<Predicate> parse_neg() {
        if (is_keyword(peek(), "not")) {
            take();
            auto inner = parse_neg();
            if (!inner) return std::nullopt;
            return Predicate::make_not(std::move(*inner));
        }
        return parse_primary();
    }

    std::optional<Predicate> parse_conj() {
        auto first = parse_neg();
        if (!first) return std::nullopt;
        if (!is_keyword(peek(), "and")) return first;
        std::vector<Predicate> children;
        children.push_back(std::move(*first));
        while (is_keyword(peek(), "and")) {
            take();
            auto next = parse_neg();
            if (!next) return std::nullopt;
            children.push_back(std::move(*next));
        }
        return Predicate::make_and(std::move(children));
    }

    std::optional<Predicate> parse_pred() {
        auto first = parse_conj();
        if (!first) return std::nullopt;
        if (!is_keyword(peek(), "or")) return first;
        std::vector<Predicate> children;
        children.push_back(std::move(*first));
        while (is_keyword(peek(), "or")) {
            take();
            auto next = parse_conj();
            if (!next) return std::nullopt;
            children.push_back(std::move(*next));
        }
        return Predicate::make_or(std::move(children));
    }

    void parse_view() {
        Token kw = take(); // 'view'
        auto name = expect_name("view name");
        if (!name) return synchronize();
        for (const auto& v : views_)
            if (v.name == *name) error(kw, "duplicate view name '" + *name + "'");
        if (!expect(Tok::Equal, "'='")) return synchronize();
        if (!is_keyword(peek(), "project")) {
            error(peek(), "expected 'project'");
            return synchronize();
        }
        take();
        pred_refs_.clear();
        auto projection = parse_projection();
        if (!is_keyword(peek(), "where")) {
            error(peek(), "expected 'where'");
            return synchronize();
        }
        take();
        auto pred = parse_pred();
        if (!pred) return synchronize();
        if (!is_keyword(peek(), "from")) {
            error(peek(), "expected 'from'");
            return synchronize();
        }
        take();
        Token rel_tok = peek();
        auto rel = expect_name("relation name");
        if (!rel) return synchronize();
        expect(Tok::Semicolon, "';'");
        auto idx = schema_.relation_index(*rel);
        if (!idx) {
            error(rel_tok, "unknown relation '" + *rel + "'");
            return;
        }
        for (const RefSite& site : pred_refs_)
            if (site.ref.relation != *rel) {
                error({Tok::Ident, "", 0, site.line, site.column},
                      "view must reference a single relation (view '" + *name + "' is over '" +
                          *rel + "' but mentions " + to_string(site.ref) + ")");
                return;
            }
        if (projection.empty()) {
            error(rel_tok, "view '" + *name + "' has an empty projection");
            return;
        }
        ViewDef v;
        v.name = *name;
        v.source = *idx;
        v.projection = std::move(projection);
        v.predicate = std::move(*pred);
        views_.push_back(std::move(v));
    }

    void parse_query() {
        Token kw = take(); // 'query'
        if (saw_query_) {
            error(kw, "multiple query declarations (exactly one is allowed)");
            synchronize();
            return;
        }
        saw_query_ = true;
        if (!is_keyword(peek(), "project")) {
            error(peek(), "expected 'project'");
            return synchronize();
        }
        take();
        pred_refs_.clear();
        auto projection = parse_projection();
        if (!is_keyword(peek(), "where")) {
            error(peek(), "expected 'where'");
            return synchronize();
        }
        take();
        auto pred = parse_pred();
        if (!pred) return synchronize();
        if (!is_keyword(peek(), "from")) {
            error(peek(), "expected 'from'");
            return synchronize();
        }
        take();
        std::vector<std::pair<std::string, Token>> from;
        do {
            Token rel_tok = peek();
            auto rel = expect_name("relation name");
            if (!rel) return synchronize();
            from.emplace_back(*rel, rel_tok);
        } while (accept(Tok::Comma));
        expect(Tok::Semicolon, "';'");

        std::set<std::string> seen;
        for (const auto& [rel, tok] : from) {
            if (!schema_.relation_index(rel)) {
                error(tok, "unknown relation '" + rel + "'");
                continue;
            }
            if (!seen.insert(rel).second)
                error(tok, "self join not supported (relation '" + rel + "' listed twice)");
        }
        for (const auto& decl : schema_.relations)
            if (!seen.count(decl.name))
                error(kw, "query must join every declared relation (missing '" + decl.name + "')");
        if (projection.empty()) {
            error(kw, "query has an empty projection");
            return;
        }
        query_.projection = std::move(projection);
        query_.predicate = std::move(*pred);
    }

    std::vector<Token> tokens_;
    std::vector<ParseDiagnostic>& diags_;
    std::size_t pos_ = 0;

    Schema schema_;
    std::vector<ViewDef> views_;
    QueryDef query_;
    bool saw_query_ = false;
    std::vector<RefSite> pred_refs_; // column references of the decl being parsed
};

} // namespace

bool ParseResult::has_errors() const {
    for (const auto& d : diagnostics)
        if (d.severity == Severity::Error) return true;
    return false;
}

std::string format_diagnostic(const ParseDiagnostic& d, std::string_view path) {
    std::ostringstream os;
    os << path << ":" << d.line << ":" << d.column << ": "
       << (d.severity == Severity::Error ? "error" : "warning") << ": " << d.message;
    return os.str();
}

ParseResult parse_problem(const SourceFile& src) {
    std::vector<ParseDiagnostic> diags;
    Lexer lexer(src.text);
    auto tokens = lexer.run(diags);
    Parser parser(std::move(tokens), diags);
    return parser.run();
}

namespace {

std::string term_to_dsl(const Term& t) {
    if (t.kind == Term::Kind::Column) return to_string(t.column);
    return to_string(t.constant);
}

void pred_to_dsl(const Predicate& p, std::string& out) {
    auto child_to_dsl = [&out](const Predicate& c) {
        // Parenthesize non-leaf children so the printed nesting re-parses
        // to the identical tree.
        bool wrap = c.kind == Predicate::Kind::And || c.kind == Predicate::Kind::Or ||
                    c.kind == Predicate::Kind::Not;
        if (wrap) out += "(";
        pred_to_dsl(c, out);
        if (wrap) out += ")";
    };
    switch (p.kind) {
        case Predicate::Kind::True: out += "true"; break;
        case Predicate::Kind::False: out += "false"; break;
        case Predicate::Kind::Not:
            out += "not ";
            child_to_dsl(p.children.front());
            break;
        case Predicate::Kind::And:
        case Predicate::Kind::Or: {
            const char* sep = p.kind == Predicate::Kind::And ? " and " : " or ";
            for (std::size_t i = 0; i < p.children.size(); ++i) {
                if (i) out += sep;
                child_to_dsl(p.children[i]);
            }
            break;
        }
        case Predicate::Kind::Atom:
            out += term_to_dsl(p.lhs);
            out += p.op == CmpOp::Eq ? " = " : p.op == CmpOp::Lt ? " < " : " <= ";
            out += term_to_dsl(p.rhs);
            break;
    }
}

} // namespace

std::string predicate_to_dsl(const Predicate& p) {
    std::string out;
    pred_to_dsl(p, out);
    return out;
}

std::string to_dsl(const Problem& p) {
    std::ostringstream os;
    for (const auto& rel : p.schema.relations) {
        os << "relation " << rel.name << "(";
        for (std::size_t i = 0; i < rel.columns.size(); ++i) {
            if (i) os << ", ";
            os << rel.columns[i].name << ": " << sort_name(rel.columns[i].sort);
        }
        os << ");\n";
    }
    for (const auto& v : p.views) {
        os << "view " << v.name << " = project ";
        for (std::size_t i = 0; i < v.projection.size(); ++i) {
            if (i) os << ", ";
            os << to_string(v.projection[i]);
        }
        os << " where " << predicate_to_dsl(v.predicate) << " from "
           << p.schema.relation(v.source).name << ";\n";
    }
    os << "query project ";
    for (std::size_t i = 0; i < p.query.projection.size(); ++i) {
        if (i) os << ", ";
        os << to_string(p.query.projection[i]);
    }
    os << " where " << predicate_to_dsl(p.query.predicate) << " from ";
    for (std::size_t i = 0; i < p.schema.relations.size(); ++i) {
        if (i) os << ", ";
        os << p.schema.relations[i].name;
    }
    os << ";\n";
    return os.str();
}

} // namespace qdet
