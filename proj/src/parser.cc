#include "mlnqa/parser.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mlnqa/error.h"

namespace mlnqa {
namespace {

enum class Tok { kIdent, kString, kNumber, kPunct, kEnd };

struct Token {
  Tok type = Tok::kEnd;
  std::string text;
  int begin = 0;  // 1-based column
  int end = 0;    // exclusive
  double number = 0.0;
};

struct Line {
  std::string_view text;
  int number = 0;
};

std::vector<Line> SplitLines(std::string_view text) {
  std::vector<Line> out;
  int n = 1;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back({line, n++});
    start = nl + 1;
  }
  return out;
}

class Lexer {
 public:
  Lexer(Line line, std::string_view file) : line_(line), file_(file) {}

  SourceSpan Span(int begin, int end) const {
    return {std::string(file_), line_.number, begin, end};
  }

  [[noreturn]] void Fail(ErrorCode code, int begin, int end,
                         const std::string& msg) const {
    throw ParseError(code, Span(begin, end), msg);
  }

  std::vector<Token> Tokenize() const {
    std::vector<Token> out;
    std::string_view s = line_.text;
    size_t i = 0;
    auto col = [](size_t pos) { return static_cast<int>(pos) + 1; };
    while (i < s.size()) {
      char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') break;
      size_t start = i;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) ||
                                s[i] == '_'))
          ++i;
        out.push_back({Tok::kIdent, std::string(s.substr(start, i - start)),
                       col(start), col(i)});
        continue;
      }
      if (c == '"') {
        std::string value;
        ++i;
        bool closed = false;
        while (i < s.size()) {
          if (s[i] == '\\' && i + 1 < s.size()) {
            value += s[i + 1];
            i += 2;
            continue;
          }
          if (s[i] == '"') {
            closed = true;
            ++i;
            break;
          }
          value += s[i++];
        }
        if (!closed)
          Fail(ErrorCode::kSyntax, col(start), col(i), "unterminated string");
        out.push_back({Tok::kString, std::move(value), col(start), col(i)});
        continue;
      }
      bool starts_number =
          std::isdigit(static_cast<unsigned char>(c)) ||
          ((c == '-' || c == '+' || c == '.') && i + 1 < s.size() &&
           (std::isdigit(static_cast<unsigned char>(s[i + 1])) ||
            (c != '.' && s[i + 1] == '.')));
      if (starts_number) {
        std::string rest(s.substr(i));
        char* endp = nullptr;
        double v = std::strtod(rest.c_str(), &endp);
        size_t len = static_cast<size_t>(endp - rest.c_str());
        if (len == 0)
          Fail(ErrorCode::kSyntax, col(start), col(start + 1), "bad number");
        i += len;
        Token t{Tok::kNumber, std::string(s.substr(start, len)), col(start),
                col(i)};
        t.number = v;
        out.push_back(std::move(t));
        continue;
      }
      if (s.substr(i, 3) == "<=>") {
        out.push_back({Tok::kPunct, "<=>", col(i), col(i + 3)});
        i += 3;
        continue;
      }
      if (s.substr(i, 2) == "=>") {
        out.push_back({Tok::kPunct, "=>", col(i), col(i + 2)});
        i += 2;
        continue;
      }
      static constexpr std::string_view kSingle = "(),{}=!^.*";
      if (kSingle.find(c) != std::string_view::npos) {
        out.push_back({Tok::kPunct, std::string(1, c), col(i), col(i + 1)});
        ++i;
        continue;
      }
      Fail(ErrorCode::kSyntax, col(i), col(i + 1),
           std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::kEnd, "", col(s.size()) , col(s.size()) + 1});
    return out;
  }

 private:
  Line line_;
  std::string_view file_;
};

/// Cursor over one line's tokens.
class TokenStream {
 public:
  TokenStream(const Lexer& lexer, std::vector<Token> tokens)
      : lexer_(lexer), tokens_(std::move(tokens)) {}

  const Token& Peek(size_t ahead = 0) const {
    size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  const Token& Next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool AtEnd() const { return Peek().type == Tok::kEnd; }
  bool IsPunct(std::string_view p, size_t ahead = 0) const {
    return Peek(ahead).type == Tok::kPunct && Peek(ahead).text == p;
  }
  bool IsIdent(std::string_view word) const {
    return Peek().type == Tok::kIdent && Peek().text == word;
  }
  bool Accept(std::string_view punct) {
    if (!IsPunct(punct)) return false;
    Next();
    return true;
  }
  const Token& Expect(std::string_view punct) {
    if (!IsPunct(punct)) Fail(Peek(), "expected '" + std::string(punct) + "'");
    return Next();
  }
  const Token& ExpectType(Tok type, std::string_view what) {
    if (Peek().type != type) Fail(Peek(), "expected " + std::string(what));
    return Next();
  }
  void ExpectEnd() {
    if (!AtEnd()) Fail(Peek(), "unexpected trailing input");
  }
  [[noreturn]] void Fail(const Token& t, const std::string& msg,
                         ErrorCode code = ErrorCode::kSyntax) const {
    lexer_.Fail(code, t.begin, std::max(t.end, t.begin + 1), msg);
  }
  const Lexer& lexer() const { return lexer_; }

 private:
  const Lexer& lexer_;
  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

bool StartsLower(std::string_view s) {
  return !s.empty() && std::islower(static_cast<unsigned char>(s[0]));
}

std::string ConstantName(const Token& t) {
  return t.type == Tok::kString ? NormalizeString(t.text) : t.text;
}

bool IsConstantToken(const Token& t) {
  return t.type == Tok::kString ||
         (t.type == Tok::kIdent && !StartsLower(t.text) &&
          std::isupper(static_cast<unsigned char>(t.text[0])));
}

// ---------------------------------------------------------------------------
// Formula parsing

class FormulaParser {
 public:
  FormulaParser(TokenStream& ts, const MlnProgram& program)
      : ts_(ts), program_(program) {}

  Formula Parse() { return ParseEquiv(); }

 private:
  Formula ParseEquiv() {
    Formula lhs = ParseImplies();
    while (ts_.Accept("<=>")) lhs = Formula::Equiv(lhs, ParseImplies());
    return lhs;
  }

  Formula ParseImplies() {
    Formula lhs = ParseOr();
    if (ts_.Accept("=>")) return Formula::Implies(lhs, ParseImplies());
    return lhs;
  }

  Formula ParseOr() {
    std::vector<Formula> parts{ParseAnd()};
    while (ts_.IsIdent("v")) {
      ts_.Next();
      parts.push_back(ParseAnd());
    }
    return parts.size() == 1 ? parts[0] : Formula::Or(std::move(parts));
  }

  Formula ParseAnd() {
    std::vector<Formula> parts{ParseUnary()};
    while (ts_.Accept("^")) parts.push_back(ParseUnary());
    return parts.size() == 1 ? parts[0] : Formula::And(std::move(parts));
  }

  Formula ParseUnary() {
    if (ts_.IsPunct("!")) {
      ts_.Next();
      if (ts_.Peek().type == Tok::kIdent && ts_.IsPunct("(", 1) &&
          ts_.Peek().text != "EXIST")
        return Formula::Lit(ParseAtom(), true);
      return Formula::Not(ParseUnary());
    }
    return ParsePrimary();
  }

  Formula ParsePrimary() {
    if (ts_.Accept("(")) {
      Formula f = ParseEquiv();
      ts_.Expect(")");
      return f;
    }
    if (ts_.IsIdent("EXIST")) return ParseExists();
    if (ts_.Peek().type == Tok::kIdent) return Formula::Lit(ParseAtom(), false);
    ts_.Fail(ts_.Peek(), "expected a formula");
  }

  Formula ParseExists() {
    ts_.Next();
    std::vector<Token> names;
    do {
      const Token& t = ts_.ExpectType(Tok::kIdent, "variable");
      if (!StartsLower(t.text)) ts_.Fail(t, "existential variables must be lowercase");
      if (var_sorts_.contains(t.text))
        ts_.Fail(t, "variable " + t.text + " is already bound",
                 ErrorCode::kUnsupportedExistential);
      names.push_back(t);
      bound_.insert(t.text);
    } while (ts_.Accept(","));
    ts_.Expect("(");
    Formula body = ParseEquiv();
    ts_.Expect(")");
    std::vector<Term> vars;
    for (const Token& t : names) {
      auto it = var_sorts_.find(t.text);
      if (it == var_sorts_.end())
        ts_.Fail(t, "existential variable " + t.text + " unused",
                 ErrorCode::kSortMismatch);
      vars.push_back(Term::Variable(t.text, it->second));
    }
    return Formula::Exists(std::move(vars), std::move(body));
  }

  Atom ParseAtom() {
    const Token& name = ts_.ExpectType(Tok::kIdent, "predicate name");
    const PredicateDecl* decl = program_.FindPredicate(name.text);
    if (!decl)
      ts_.Fail(name, "undeclared predicate " + name.text,
               ErrorCode::kUndeclaredPredicate);
    ts_.Expect("(");
    Atom atom{name.text, {}};
    if (!ts_.IsPunct(")")) {
      do {
        const Token& arg = ts_.Next();
        size_t slot = atom.args.size();
        if (slot >= decl->arity())
          ts_.Fail(arg, name.text + " takes " + std::to_string(decl->arity()) +
                            " arguments", ErrorCode::kArityMismatch);
        const std::string& sort = decl->arg_sorts[slot];
        if (arg.type == Tok::kIdent && StartsLower(arg.text)) {
          auto [it, inserted] = var_sorts_.emplace(arg.text, sort);
          if (!inserted && it->second != sort)
            ts_.Fail(arg, "variable " + arg.text + " has sort " + it->second +
                              " but slot expects " + sort,
                     ErrorCode::kSortMismatch);
          atom.args.push_back(Term::Variable(arg.text, sort));
        } else if (IsConstantToken(arg)) {
          std::string c = ConstantName(arg);
          if (!program_.HasConstant(sort, c))
            ts_.Fail(arg, "constant " + FormatConstant(c) +
                              " is not declared in sort " + sort,
                     ErrorCode::kUndeclaredConstant);
          atom.args.push_back(Term::Constant(std::move(c), sort));
        } else {
          ts_.Fail(arg, "expected a variable or constant");
        }
      } while (ts_.Accept(","));
    }
    const Token& close = ts_.Expect(")");
    if (atom.args.size() != decl->arity())
      ts_.Fail(close, name.text + " takes " + std::to_string(decl->arity()) +
                          " arguments", ErrorCode::kArityMismatch);
    return atom;
  }

  TokenStream& ts_;
  const MlnProgram& program_;
  std::map<std::string, std::string> var_sorts_;
  std::set<std::string> bound_;
};

void ParseSortLine(TokenStream& ts, MlnProgram& program) {
  ts.Next();  // sort
  const Token& name = ts.ExpectType(Tok::kIdent, "sort name");
  std::string sort = name.text;
  program.DeclareSort(sort);
  ts.Expect("=");
  ts.Expect("{");
  if (!ts.IsPunct("}")) {
    do {
      const Token& c = ts.Next();
      if (!IsConstantToken(c))
        ts.Fail(c, "constants are quoted strings or Capitalized identifiers");
      program.AddConstant(sort, ConstantName(c));
    } while (ts.Accept(","));
  }
  ts.Expect("}");
  ts.ExpectEnd();
}

void ParsePredLine(TokenStream& ts, MlnProgram& program) {
  ts.Next();  // pred
  const Token& name = ts.ExpectType(Tok::kIdent, "predicate name");
  if (program.FindPredicate(name.text))
    ts.Fail(name, "predicate " + name.text + " declared twice");
  PredicateDecl decl{name.text, {}, false};
  if (ts.Accept("*")) decl.closed_world = true;
  ts.Expect("(");
  if (!ts.IsPunct(")")) {
    do {
      const Token& s = ts.ExpectType(Tok::kIdent, "sort name");
      if (!program.FindSort(s.text))
        ts.Fail(s, "unknown sort " + s.text, ErrorCode::kSortMismatch);
      decl.arg_sorts.push_back(s.text);
    } while (ts.Accept(","));
  }
  ts.Expect(")");
  if (ts.Accept("*")) decl.closed_world = true;
  ts.ExpectEnd();
  program.DeclarePredicate(std::move(decl));
}

GroundAtom ParseGroundAtom(TokenStream& ts, const MlnProgram& program) {
  const Token& name = ts.ExpectType(Tok::kIdent, "predicate name");
  const PredicateDecl* decl = program.FindPredicate(name.text);
  if (!decl)
    ts.Fail(name, "undeclared predicate " + name.text,
            ErrorCode::kUndeclaredPredicate);
  GroundAtom atom{name.text, {}};
  ts.Expect("(");
  if (!ts.IsPunct(")")) {
    do {
      const Token& arg = ts.Next();
      if (!IsConstantToken(arg))
        ts.Fail(arg, "evidence arguments must be constants");
      size_t slot = atom.args.size();
      if (slot >= decl->arity())
        ts.Fail(arg, "too many arguments", ErrorCode::kArityMismatch);
      std::string c = ConstantName(arg);
      if (!program.HasConstant(decl->arg_sorts[slot], c))
        ts.Fail(arg, "constant " + FormatConstant(c) + " is not declared in sort " +
                         decl->arg_sorts[slot],
                ErrorCode::kUndeclaredConstant);
      atom.args.push_back(std::move(c));
    } while (ts.Accept(","));
  }
  const Token& close = ts.Expect(")");
  if (atom.args.size() != decl->arity())
    ts.Fail(close, "wrong number of arguments", ErrorCode::kArityMismatch);
  return atom;
}

/// Reads `key=value` where value is a number.
double ParseNumberAttribute(TokenStream& ts, std::string_view key,
                            const Token** value_token = nullptr) {
  const Token& k = ts.ExpectType(Tok::kIdent, std::string(key));
  if (k.text != key) ts.Fail(k, "expected " + std::string(key) + "=");
  ts.Expect("=");
  const Token& v = ts.ExpectType(Tok::kNumber, "number");
  if (value_token) *value_token = &v;
  return v.number;
}

std::string FormatFormulaImpl(const Formula& f, bool wrap);

std::string FormatLiteral(const Literal& l) {
  std::string out = l.negated ? "!" : "";
  out += l.atom.predicate + "(";
  for (size_t i = 0; i < l.atom.args.size(); ++i) {
    if (i) out += ',';
    const Term& t = l.atom.args[i];
    out += t.is_variable() ? t.name : FormatConstant(t.name);
  }
  return out + ")";
}

std::string FormatFormulaImpl(const Formula& f, bool wrap) {
  using K = Formula::Kind;
  auto join = [&](std::string_view op) {
    if (f.children().size() < 2)
      throw Error(ErrorCode::kInvalidProgram,
                  "cannot serialize a connective with fewer than two operands");
    std::string out;
    for (size_t i = 0; i < f.children().size(); ++i) {
      if (i) out += op;
      out += FormatFormulaImpl(f.children()[i], true);
    }
    return out;
  };
  std::string body;
  switch (f.kind()) {
    case K::kLiteral:
      return FormatLiteral(f.literal());
    case K::kNot:
      return "!(" + FormatFormulaImpl(f.children()[0], false) + ")";
    case K::kExists: {
      body = "EXIST ";
      for (size_t i = 0; i < f.bound_variables().size(); ++i) {
        if (i) body += ',';
        body += f.bound_variables()[i].name;
      }
      return body + " (" + FormatFormulaImpl(f.children()[0], false) + ")";
    }
    case K::kAnd: body = join(" ^ "); break;
    case K::kOr: body = join(" v "); break;
    case K::kImplies:
      body = FormatFormulaImpl(f.children()[0], true) + " => " +
             FormatFormulaImpl(f.children()[1], true);
      break;
    case K::kEquiv:
      body = FormatFormulaImpl(f.children()[0], true) + " <=> " +
             FormatFormulaImpl(f.children()[1], true);
      break;
  }
  return wrap ? "(" + body + ")" : body;
}

std::string Quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

// ---------------------------------------------------------------------------

MlnProgram ParseMln(std::string_view text, std::string_view file) {
  MlnProgram program;
  for (const Line& line : SplitLines(text)) {
    Lexer lexer(line, file);
    TokenStream ts(lexer, lexer.Tokenize());
    if (ts.AtEnd()) continue;
    if (ts.IsIdent("sort") && ts.Peek(1).type == Tok::kIdent) {
      ParseSortLine(ts, program);
      continue;
    }
    if (ts.IsIdent("pred") && ts.Peek(1).type == Tok::kIdent) {
      ParsePredLine(ts, program);
      continue;
    }
    std::optional<double> weight;
    if (ts.Peek().type == Tok::kNumber) weight = ts.Next().number;
    FormulaParser fp(ts, program);
    Formula f = fp.Parse();
    if (weight) {
      if (ts.IsPunct(".")) ts.Fail(ts.Peek(), "soft formulas do not end with '.'");
      ts.ExpectEnd();
      program.AddFormula(std::move(f), Weight::Soft(*weight));
    } else {
      if (!ts.IsPunct("."))
        ts.Fail(ts.Peek(), "hard formulas end with '.', soft ones start with a weight");
      ts.Next();
      ts.ExpectEnd();
      program.AddFormula(std::move(f), Weight::Hard());
    }
  }
  return program;
}

Evidence ParseDb(std::string_view text, const MlnProgram& context,
                 std::string_view file) {
  Evidence evidence;
  for (const Line& line : SplitLines(text)) {
    Lexer lexer(line, file);
    TokenStream ts(lexer, lexer.Tokenize());
    if (ts.AtEnd()) continue;
    const Token first = ts.Peek();
    bool negated = ts.Accept("!");
    GroundAtom atom = ParseGroundAtom(ts, context);
    try {
      if (ts.IsIdent("p")) {
        if (negated) ts.Fail(first, "soft evidence cannot be negated");
        const Token* value = nullptr;
        double p = ParseNumberAttribute(ts, "p", &value);
        if (!(p > 0.0 && p < 1.0))
          ts.Fail(*value, "soft probability must be in (0,1)",
                  ErrorCode::kProbabilityOutOfRange);
        ts.ExpectEnd();
        evidence.AddSoft(std::move(atom), p);
      } else {
        ts.ExpectEnd();
        if (negated)
          evidence.AddFalse(std::move(atom));
        else
          evidence.AddTrue(std::move(atom));
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      ts.Fail(first, e.what(), e.code());
    }
  }
  return evidence;
}

QgDocument ParseQgDocument(std::string_view text, std::string_view file) {
  QgDocument doc;
  enum class Block { kNone, kQuestion, kOption, kRule } block = Block::kNone;
  LabeledGraph* current = nullptr;
  for (const Line& line : SplitLines(text)) {
    Lexer lexer(line, file);
    TokenStream ts(lexer, lexer.Tokenize());
    if (ts.AtEnd()) continue;
    const Token& head = ts.ExpectType(Tok::kIdent, "graph, node or edge");
    if (head.text == "graph") {
      const Token& kind = ts.ExpectType(Tok::kIdent, "question, option or rule");
      if (kind.text == "question") {
        if (doc.question) ts.Fail(kind, "only one question block is allowed");
        doc.question.emplace();
        current = &*doc.question;
        block = Block::kQuestion;
      } else if (kind.text == "option") {
        if (!doc.question)
          ts.Fail(kind, "option blocks follow the question block");
        const Token& name = ts.Next();
        if (name.type != Tok::kIdent && name.type != Tok::kString)
          ts.Fail(name, "expected option name");
        for (const OptionGraph& o : doc.options)
          if (o.name == name.text) ts.Fail(name, "duplicate option " + name.text);
        doc.options.emplace_back();
        doc.options.back().name = name.text;
        current = &doc.options.back();
        block = Block::kOption;
      } else if (kind.text == "rule") {
        const Token& id = ts.ExpectType(Tok::kIdent, "rule id");
        for (const KbRuleGraph& r : doc.rules)
          if (r.id == id.text) ts.Fail(id, "duplicate rule id " + id.text);
        KbRuleGraph rule;
        rule.id = id.text;
        if (!ts.AtEnd()) {
          const Token* value = nullptr;
          rule.confidence = ParseNumberAttribute(ts, "conf", &value);
          if (!(rule.confidence > 0.0 && rule.confidence < 1.0))
            ts.Fail(*value, "rule confidence must be in (0,1)",
                    ErrorCode::kProbabilityOutOfRange);
        }
        doc.rules.push_back(std::move(rule));
        current = &doc.rules.back();
        block = Block::kRule;
      } else {
        ts.Fail(kind, "unknown graph kind " + kind.text);
      }
      ts.ExpectEnd();
      continue;
    }
    if (!current) ts.Fail(head, "node/edge outside of a graph block");
    // Option blocks may reference the question's setup nodes.
    auto find_node = [&](std::string_view id) -> const GraphNode* {
      if (const GraphNode* n = current->FindNode(id)) return n;
      if (block == Block::kOption) return doc.question->FindNode(id);
      return nullptr;
    };
    if (head.text == "node") {
      const Token& id = ts.ExpectType(Tok::kIdent, "node id");
      if (find_node(id.text))
        ts.Fail(id, "duplicate node id " + id.text, ErrorCode::kDuplicateNode);
      const Token& kind = ts.ExpectType(Tok::kIdent, "entity or event");
      GraphNode node;
      node.id = id.text;
      if (kind.text == "entity")
        node.kind = NodeKind::kEntity;
      else if (kind.text == "event")
        node.kind = NodeKind::kEvent;
      else
        ts.Fail(kind, "node kind must be entity or event");
      const Token& label = ts.ExpectType(Tok::kString, "quoted label");
      node.label = NormalizeString(label.text);
      const Token& key = ts.ExpectType(Tok::kIdent, "role=");
      if (key.text != "role") ts.Fail(key, "expected role=");
      ts.Expect("=");
      const Token& role = ts.ExpectType(Tok::kIdent, "role");
      bool legal = false;
      if (role.text == "setup") {
        node.role = NodeRole::kSetup;
        legal = block == Block::kQuestion;
      } else if (role.text == "query") {
        node.role = NodeRole::kQuery;
        legal = block == Block::kQuestion || block == Block::kOption;
      } else if (role.text == "lhs") {
        node.role = NodeRole::kLhs;
        legal = block == Block::kRule;
      } else if (role.text == "rhs") {
        node.role = NodeRole::kRhs;
        legal = block == Block::kRule;
      } else {
        ts.Fail(role, "unknown role " + role.text);
      }
      if (!legal)
        ts.Fail(role, "role " + role.text + " is not allowed in this graph",
                ErrorCode::kIllegalRole);
      ts.ExpectEnd();
      current->nodes.push_back(std::move(node));
    } else if (head.text == "edge") {
      const Token& label = ts.ExpectType(Tok::kIdent, "edge label");
      const Token& from = ts.ExpectType(Tok::kIdent, "source node id");
      const Token& to = ts.ExpectType(Tok::kIdent, "target node id");
      if (!find_node(from.text))
        ts.Fail(from, "edge references missing node " + from.text,
                ErrorCode::kMissingNode);
      if (!find_node(to.text))
        ts.Fail(to, "edge references missing node " + to.text,
                ErrorCode::kMissingNode);
      ts.ExpectEnd();
      current->edges.push_back({label.text, from.text, to.text});
    } else {
      ts.Fail(head, "expected graph, node or edge");
    }
  }
  return doc;
}

std::pair<QuestionGraph, std::vector<KbRuleGraph>> ParseQg(
    std::string_view text, std::string_view file) {
  QgDocument doc = ParseQgDocument(text, file);
  return {doc.question.value_or(QuestionGraph{}), std::move(doc.rules)};
}

EntailmentTable ParseEnt(std::string_view text, std::string_view file) {
  EntailmentTable table;
  for (const Line& line : SplitLines(text)) {
    Lexer lexer(line, file);
    TokenStream ts(lexer, lexer.Tokenize());
    if (ts.AtEnd()) continue;
    const Token& head = ts.ExpectType(Tok::kIdent, "entails");
    if (head.text != "entails") ts.Fail(head, "expected entails");
    const Token& from = ts.ExpectType(Tok::kString, "quoted string");
    const Token& to = ts.ExpectType(Tok::kString, "quoted string");
    const Token& score = ts.ExpectType(Tok::kNumber, "score");
    if (!(score.number >= 0.0 && score.number <= 1.0))
      ts.Fail(score, "score must be in [0,1]", ErrorCode::kScoreOutOfRange);
    ts.ExpectEnd();
    table.Set(from.text, to.text, score.number);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Writers

std::string FormatNumber(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::string FormatFormula(const Formula& formula) {
  return FormatFormulaImpl(formula, false);
}

std::string SerializeMln(const MlnProgram& program) {
  std::ostringstream out;
  for (const SortDecl& s : program.sorts()) {
    if (IsBuiltinSort(s.name) && s.constants.empty()) continue;
    out << "sort " << s.name << " = {";
    for (size_t i = 0; i < s.constants.size(); ++i)
      out << (i ? ", " : "") << FormatConstant(s.constants[i]);
    out << "}\n";
  }
  for (const PredicateDecl& p : program.predicates()) {
    out << "pred " << p.name << "(";
    for (size_t i = 0; i < p.arg_sorts.size(); ++i)
      out << (i ? "," : "") << p.arg_sorts[i];
    out << ")" << (p.closed_world ? "*" : "") << "\n";
  }
  for (const WeightedFormula& wf : program.formulas()) {
    if (wf.weight.is_hard())
      out << FormatFormula(wf.formula) << ".\n";
    else
      out << FormatNumber(wf.weight.value()) << " " << FormatFormula(wf.formula)
          << "\n";
  }
  return out.str();
}

std::string SerializeDb(const Evidence& evidence) {
  std::ostringstream out;
  for (const GroundAtom& a : evidence.hard_true()) out << a.ToString() << "\n";
  for (const GroundAtom& a : evidence.hard_false())
    out << "!" << a.ToString() << "\n";
  for (const auto& [a, p] : evidence.soft())
    out << a.ToString() << " p=" << FormatNumber(p) << "\n";
  return out.str();
}

std::string SerializeQg(const QgDocument& document) {
  std::ostringstream out;
  auto write_graph = [&](const LabeledGraph& g) {
    for (const GraphNode& n : g.nodes)
      out << "node " << n.id << " " << NodeKindName(n.kind) << " "
          << Quote(n.label) << " role=" << NodeRoleName(n.role) << "\n";
    for (const GraphEdge& e : g.edges)
      out << "edge " << e.label << " " << e.from << " " << e.to << "\n";
  };
  if (document.question) {
    out << "graph question\n";
    write_graph(*document.question);
  }
  for (const OptionGraph& o : document.options) {
    out << "graph option " << o.name << "\n";
    write_graph(o);
  }
  for (const KbRuleGraph& r : document.rules) {
    out << "graph rule " << r.id << " conf=" << FormatNumber(r.confidence)
        << "\n";
    write_graph(r);
  }
  return out.str();
}

std::string SerializeEnt(const EntailmentTable& table) {
  std::ostringstream out;
  for (const auto& [key, score] : table.entries())
    out << "entails " << Quote(key.first) << " " << Quote(key.second) << " "
        << FormatNumber(score) << "\n";
  return out.str();
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << contents;
}

}  // namespace mlnqa
