// printf-style and str.format() interpolation rewritten as f-strings.

#include <cctype>

#include "common.hpp"

namespace pyidiom::detail {
namespace {

struct StringLiteral {
  std::string prefix;  // without u/U
  std::string quote;
  std::string_view body;
  bool raw = false;
};

std::optional<StringLiteral> split_literal(std::string_view text) {
  std::size_t p = 0;
  while (p < text.size() && std::isalpha(static_cast<unsigned char>(text[p]))) ++p;
  StringLiteral lit;
  for (char c : text.substr(0, p)) {
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == 'b' || lower == 'f') return std::nullopt;
    if (lower == 'r') lit.raw = true;
    if (lower != 'u') lit.prefix.push_back(c);
  }
  const char q = text[p];
  const bool triple = text.size() >= p + 6 && text[p + 1] == q && text[p + 2] == q;
  lit.quote = std::string(triple ? 3 : 1, q);
  lit.body = text.substr(p + lit.quote.size(), text.size() - p - 2 * lit.quote.size());
  return lit;
}

enum class Conversion { Str, Repr, Int };

struct Field {
  std::string suffix;  // conversion and spec appended after the expression
  Conversion conversion = Conversion::Str;
};

// Literal pieces around the fields, already escaped for an f-string.
struct Template {
  std::vector<std::string> literals;  // one more than fields
  std::vector<Field> fields;
};

std::optional<Template> parse_percent(const StringLiteral& lit) {
  Template t;
  std::string current;
  const std::string_view body = lit.body;
  if (!lit.raw && body.find("\\N") != std::string_view::npos) return std::nullopt;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (c == '{' || c == '}') {
      current += std::string(2, c);
    } else if (c == '%') {
      if (i + 1 >= body.size()) return std::nullopt;
      const char spec = body[++i];
      if (spec == '%') {
        current += '%';
        continue;
      }
      Field f;
      if (spec == 's') {
        f.conversion = Conversion::Str;
      } else if (spec == 'r') {
        f.conversion = Conversion::Repr;
        f.suffix = "!r";
      } else if (spec == 'd' || spec == 'i') {
        f.conversion = Conversion::Int;
      } else {
        return std::nullopt;
      }
      t.literals.push_back(std::move(current));
      current.clear();
      t.fields.push_back(f);
    } else {
      current += c;
    }
  }
  t.literals.push_back(std::move(current));
  return t;
}

std::optional<Template> parse_format(const StringLiteral& lit) {
  Template t;
  std::string current;
  const std::string_view body = lit.body;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (c == '{' && i + 1 < body.size() && body[i + 1] == '{') {
      current += "{{";
      ++i;
    } else if (c == '}' && i + 1 < body.size() && body[i + 1] == '}') {
      current += "}}";
      ++i;
    } else if (c == '}') {
      return std::nullopt;
    } else if (c == '{') {
      const std::size_t close = body.find('}', i);
      if (close == std::string_view::npos) return std::nullopt;
      const std::string_view field = body.substr(i + 1, close - i - 1);
      if (field.find('{') != std::string_view::npos) return std::nullopt;
      Field f;
      std::string_view rest = field;
      if (!rest.empty() && rest.front() == '!') {
        if (rest.size() < 2 || (rest[1] != 'r' && rest[1] != 's' && rest[1] != 'a')) return std::nullopt;
        f.suffix = std::string(rest.substr(0, 2));
        rest.remove_prefix(2);
      }
      if (!rest.empty() && rest.front() != ':') return std::nullopt;  // named or numbered field
      f.suffix += std::string(rest);
      t.literals.push_back(std::move(current));
      current.clear();
      t.fields.push_back(f);
      i = close;
    } else {
      if (!lit.raw && c == '\\' && i + 1 < body.size() && body[i + 1] == 'N') return std::nullopt;
      current += c;
    }
  }
  t.literals.push_back(std::move(current));
  return t;
}

bool embeddable(const SyntaxNode& expr, const SourceUnit& unit, const StringLiteral& lit) {
  if (contains_kind(expr, {NodeKind::Lambda, NodeKind::NamedExpr, NodeKind::Yield, NodeKind::Starred})) {
    return false;
  }
  if (expr.kind == NodeKind::GeneratorExp) return false;
  const std::string_view text = unit.text_of(expr);
  if (text.find_first_of("\\{}#\n\r") != std::string_view::npos) return false;
  if (text.find(lit.quote.front()) != std::string_view::npos) return false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '!' && (i + 1 >= text.size() || text[i + 1] != '=')) return false;
  }
  return true;
}

const SyntaxNode* single_string_token(const SyntaxNode& node) {
  if (node.kind != NodeKind::String || node.children.size() != 1) return nullptr;
  return &node.children.front();
}

struct Candidate {
  const SyntaxNode* whole;
  const SyntaxNode* literal;
  std::vector<const SyntaxNode*> args;
  bool percent;
};

std::vector<Candidate> candidates(const SourceUnit& unit) {
  const std::string_view src = unit.text();
  std::vector<Candidate> out;
  walk(unit.tree(), [&](const SyntaxNode& n) {
    if (n.kind == NodeKind::BinOp && n.children.size() == 3 && n.children[1].is_token("%", src)) {
      const SyntaxNode* lit = single_string_token(n.children[0]);
      if (!lit) return;
      Candidate c{&n, lit, {}, true};
      const SyntaxNode& arg = n.children[2];
      const SyntaxNode& inner = unparen(arg);
      if (inner.kind == NodeKind::Tuple && !is_bare_tuple(inner, src)) {
        c.args = node_children(inner);
      } else {
        c.args.push_back(&inner);
      }
      out.push_back(std::move(c));
    } else if (n.kind == NodeKind::Call) {
      const SyntaxNode& func = n.children.front();
      if (func.kind != NodeKind::Attribute || func.children.size() != 3) return;
      if (!func.children[2].is_token("format", src)) return;
      const SyntaxNode* lit = single_string_token(func.children[0]);
      if (!lit) return;
      Candidate c{&n, lit, {}, false};
      for (const SyntaxNode* arg : node_children(n)) {
        if (arg == &func) continue;
        if (arg->children.size() != 1 || arg->children.front().is_token()) {
          c.args.push_back(nullptr);  // keyword, starred or double-starred
        } else {
          c.args.push_back(&arg->children.front());
        }
      }
      out.push_back(std::move(c));
    }
  });
  return out;
}

}  // namespace

std::vector<SiteRewrite> fstring_sites(const SourceUnit& unit, SafetyFacts&, const EngineOptions&) {
  const std::string_view src = unit.text();
  std::vector<SiteRewrite> out;
  for (const Candidate& c : candidates(unit)) {
    const auto lit = split_literal(unit.text_of(*c.literal));
    if (!lit) continue;
    const auto tmpl = c.percent ? parse_percent(*lit) : parse_format(*lit);
    SiteBuilder site(unit, IdiomKind::FString, c.whole->span);
    site.bind("template", unit.text_of(*c.literal)).bind("style", c.percent ? "percent" : "format");
    site.guard("supported_placeholders", tmpl.has_value() && !tmpl->fields.empty());
    bool plain_args = true;
    for (const SyntaxNode* arg : c.args) plain_args = plain_args && arg != nullptr;
    site.guard("positional_arguments_only", plain_args);
    site.guard("argument_count_matches", tmpl && tmpl->fields.size() == c.args.size());
    bool embed = plain_args;
    for (const SyntaxNode* arg : c.args) embed = embed && embeddable(*arg, unit, *lit);
    site.guard("arguments_embeddable", embed);
    site.guard("no_comments", !has_comment(unit, c.whole->span));
    if (site.passed()) {
      std::string text = lit->prefix + "f" + lit->quote;
      for (std::size_t i = 0; i < tmpl->fields.size(); ++i) {
        const Field& f = tmpl->fields[i];
        const SyntaxNode& arg = *c.args[i];
        text += tmpl->literals[i];
        text += "{" + std::string(unit.text_of(arg));
        if (f.conversion == Conversion::Int && !is_integer_literal(arg, src)) text += ":d";
        text += f.suffix + "}";
      }
      text += tmpl->literals.back() + lit->quote;
      site.edit(c.whole->span, text);
    }
    out.push_back(site.finish());
  }
  return out;
}

}  // namespace pyidiom::detail
