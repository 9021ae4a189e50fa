#include "tfsprime/avm_io.hpp"

#include <cctype>
#include <functional>

#include "unify_engine.hpp"

namespace tfsprime {

namespace {

bool is_punct(char c) {
  switch (c) {
    case '[': case ']': case '<': case '>': case ',': case '|': case '!': case ':': case '=':
      return true;
    default:
      return false;
  }
}

bool is_ident_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return !std::isspace(u) && !is_punct(c) && c != '#' && c != '"' && c != '%' && c != '@';
}

}  // namespace

AvmLexer::AvmLexer(std::string_view text, int first_line) : text_(text), line_(first_line) { advance(); }

AvmLexer::Token AvmLexer::next() {
  Token t = current_;
  advance();
  return t;
}

void AvmLexer::expect(std::string_view punct) {
  if (!at(punct)) fail("expected '" + std::string(punct) + "'");
  advance();
}

void AvmLexer::fail(const std::string& message) const {
  std::string found = current_.kind == Tok::End ? "end of input" : "'" + current_.text + "'";
  throw ParseError(message + ", found " + found, current_.line, current_.column);
}

void AvmLexer::advance() {
  bool spaced = pos_ == 0;
  while (pos_ < text_.size()) {
    char c = text_[pos_];
    if (c == '%') {
      while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      continue;
    }
    if (!std::isspace(static_cast<unsigned char>(c))) break;
    spaced = true;
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }
  Token t;
  t.line = line_;
  t.column = column_;
  t.spaced = spaced;
  if (pos_ >= text_.size()) {
    t.kind = Tok::End;
    current_ = t;
    return;
  }
  std::size_t start = pos_;
  t.offset = start;
  char c = text_[pos_];
  if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
    t.kind = Tok::Arrow;
    pos_ += 2;
  } else if (is_punct(c)) {
    t.kind = Tok::Punct;
    ++pos_;
  } else if (c == '#') {
    ++pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start + 1) throw ParseError("tag needs a number", t.line, t.column);
    t.kind = Tok::Tag;
  } else if (c == '"') {
    ++pos_;
    while (pos_ < text_.size() && text_[pos_] != '"' && text_[pos_] != '\n') ++pos_;
    if (pos_ >= text_.size() || text_[pos_] != '"') throw ParseError("unterminated word literal", t.line, t.column);
    ++pos_;
    t.kind = Tok::Word;
  } else if (c == '@') {
    ++pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    t.kind = Tok::Directive;
  } else {
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    t.kind = Tok::Ident;
  }
  t.text = std::string(text_.substr(start, pos_ - start));
  column_ += static_cast<int>(pos_ - start);
  if (t.kind == Tok::Tag) t.text = t.text.substr(1);
  if (t.kind == Tok::Word) t.text = t.text.substr(1, t.text.size() - 2);
  if (t.kind == Tok::Directive) t.text = t.text.substr(1);
  current_ = t;
}

std::string AvmLexer::rest_of_line() {
  if (current_.kind == Tok::End) return {};
  std::size_t start = current_.offset;
  std::size_t end = text_.find('\n', start);
  if (end == std::string_view::npos) end = text_.size();
  std::string out(text_.substr(start, end - start));
  if (auto c = out.find('%'); c != std::string::npos) out.resize(c);
  while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
  pos_ = end;
  column_ = 1;
  advance();
  return out;
}

namespace {

using Tok = AvmLexer::Tok;

bool starts_core(const AvmLexer& lx) {
  const auto& t = lx.peek();
  return t.kind == Tok::Ident || t.kind == Tok::Word || (t.kind == Tok::Punct && (t.text == "[" || t.text == "<"));
}

void parse_core(AvmLexer& lx, AvmAst& out);

}  // namespace

AvmAst parse_avm(AvmLexer& lx) {
  AvmAst out;
  out.line = lx.peek().line;
  out.column = lx.peek().column;
  if (lx.peek().kind == Tok::Tag) {
    out.tag = std::stoi(lx.next().text);
    if (!starts_core(lx) || lx.peek().spaced) return out;
  }
  if (!starts_core(lx)) lx.fail("expected a feature structure");
  parse_core(lx, out);
  return out;
}

namespace {

void parse_core(AvmLexer& lx, AvmAst& out) {
  const auto& t = lx.peek();
  if (t.kind == Tok::Ident || t.kind == Tok::Word) {
    out.kind = t.kind == Tok::Ident ? AvmAst::Kind::Atom : AvmAst::Kind::Word;
    out.type = lx.next().text;
    if (lx.at("!") && !lx.peek().spaced) {
      lx.next();
      out.bound = true;
    }
    return;
  }
  if (lx.at("<")) {
    lx.next();
    out.kind = AvmAst::Kind::List;
    if (lx.at(">")) {
      lx.next();
      return;
    }
    out.items.push_back(parse_avm(lx));
    while (lx.at(",")) {
      lx.next();
      out.items.push_back(parse_avm(lx));
    }
    if (lx.at("|")) {
      lx.next();
      out.tail.push_back(parse_avm(lx));
    }
    lx.expect(">");
    return;
  }
  lx.expect("[");
  out.kind = AvmAst::Kind::Bracket;
  if (lx.at("]")) {
    lx.next();
    return;
  }
  bool first = true;
  for (;;) {
    if (lx.peek().kind != Tok::Ident) lx.fail("expected a type or feature name");
    auto name = lx.next();
    if (first && (lx.at(",") || lx.at("]") || lx.at("!"))) {
      out.type = name.text;
      if (lx.at("!")) {
        lx.next();
        out.bound = true;
      }
    } else {
      std::vector<std::string> path{name.text};
      while (lx.at("|")) {
        lx.next();
        if (lx.peek().kind != Tok::Ident) lx.fail("expected a feature name");
        path.push_back(lx.next().text);
      }
      out.features.emplace_back(std::move(path), parse_avm(lx));
    }
    first = false;
    if (lx.at("]")) {
      lx.next();
      return;
    }
    lx.expect(",");
  }
}

}  // namespace

AvmAst parse_avm_text(std::string_view text) {
  AvmLexer lx(text);
  AvmAst ast = parse_avm(lx);
  if (lx.peek().kind != Tok::End) lx.fail("unexpected text after feature structure");
  return ast;
}

void collect_words(const AvmAst& ast, std::set<std::string>& words) {
  if (ast.kind == AvmAst::Kind::Word) words.insert(ast.type);
  for (const auto& [path, value] : ast.features) collect_words(value, words);
  for (const auto& item : ast.items) collect_words(item, words);
  for (const auto& item : ast.tail) collect_words(item, words);
}

FeatureStructure build_structure(const HierarchyPtr& sig, const std::vector<const AvmAst*>& roots,
                                 const std::string& context) {
  detail::GraphUnifier g(sig);
  std::map<int, NodeId> tags;
  std::vector<std::pair<NodeId, NodeId>> merges;
  using Node = FeatureStructure::Node;

  auto resolve_type = [&](const AvmAst& a, const std::string& name) -> TypeId {
    std::string key = a.kind == AvmAst::Kind::Word ? "\"" + name + "\"" : name;
    auto t = sig->find(key);
    if (!t) throw ParseError(context + ": unknown " + (a.kind == AvmAst::Kind::Word ? "word " : "type ") + name, a.line, a.column);
    return *t;
  };
  auto add_arc = [&](NodeId from, FeatureId f, NodeId to) {
    auto existing = g.raw(from).arc(f);
    if (existing) {
      merges.emplace_back(*existing, to);
      return;
    }
    auto& arcs = g.raw(from).arcs;
    arcs.emplace_back(f, to);
    std::sort(arcs.begin(), arcs.end());
  };

  std::function<NodeId(const AvmAst&)> build = [&](const AvmAst& a) -> NodeId {
    NodeId self = g.add_node(Node{});
    if (a.tag) {
      auto [it, fresh] = tags.try_emplace(*a.tag, self);
      if (!fresh) merges.emplace_back(it->second, self);
    }
    switch (a.kind) {
      case AvmAst::Kind::Tag:
        break;
      case AvmAst::Kind::Atom:
      case AvmAst::Kind::Word:
        g.raw(self).type = resolve_type(a, a.type);
        break;
      case AvmAst::Kind::Bracket:
        if (!a.type.empty()) g.raw(self).type = resolve_type(a, a.type);
        for (const auto& [path, value] : a.features) {
          NodeId cur = self;
          for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            auto f = sig->find_feature(path[i]);
            if (!f) throw ParseError(context + ": unknown feature " + path[i], value.line, value.column);
            NodeId mid = g.add_node(Node{});
            add_arc(cur, *f, mid);
            cur = mid;
          }
          auto f = sig->find_feature(path.back());
          if (!f) throw ParseError(context + ": unknown feature " + path.back(), value.line, value.column);
          NodeId v = build(value);
          add_arc(cur, *f, v);
        }
        break;
      case AvmAst::Kind::List: {
        NodeId cur = self;
        for (const auto& item : a.items) {
          g.raw(cur).type = sig->nonempty_list_type();
          NodeId head = build(item);
          add_arc(cur, sig->first_feature(), head);
          NodeId rest = g.add_node(Node{});
          add_arc(cur, sig->rest_feature(), rest);
          cur = rest;
        }
        if (a.tail.empty()) {
          g.raw(cur).type = sig->empty_list_type();
        } else {
          NodeId tail = build(a.tail.front());
          merges.emplace_back(cur, tail);
          if (a.items.empty()) g.raw(cur).type = sig->list_type();
        }
        break;
      }
    }
    if (a.bound) g.raw(self).bound = true;
    return self;
  };

  std::vector<NodeId> root_ids;
  for (const AvmAst* r : roots) root_ids.push_back(build(*r));
  for (auto [x, y] : merges) g.merge(x, y);
  g.infer_types();
  auto result = g.finish(root_ids);
  if (!result) {
    throw GrammarError(context + ": " + result.reason + " at path " + format_path(*sig, result.clash_path));
  }
  return *result.value;
}

FeatureStructure read_avm(const HierarchyPtr& sig, std::string_view text) {
  AvmAst ast = parse_avm_text(text);
  return build_structure(sig, {&ast}, "feature structure");
}

std::vector<std::string> write_avm_roots(const FeatureStructure& fs) {
  const auto& sig = fs.sig();
  std::vector<int> indegree(fs.node_count(), 0);
  for (NodeId r : fs.roots()) ++indegree[r];
  for (const auto& n : fs.nodes())
    for (const auto& arc : n.arcs) ++indegree[arc.second];
  std::vector<int> tag(fs.node_count(), 0);
  std::vector<char> printed(fs.node_count(), 0);
  int next_tag = 1;

  auto is_plain_list_cell = [&](NodeId n) {
    const auto& node = fs.node(n);
    if (node.bound) return false;
    if (node.type == sig.empty_list_type()) return node.arcs.empty();
    return node.type == sig.nonempty_list_type() && node.arcs.size() == 2 && node.arc(sig.first_feature()) &&
           node.arc(sig.rest_feature());
  };

  std::function<void(NodeId, std::string&)> emit = [&](NodeId n, std::string& out) {
    if (indegree[n] > 1) {
      if (printed[n]) {
        out += "#" + std::to_string(tag[n]);
        return;
      }
      tag[n] = next_tag++;
      out += "#" + std::to_string(tag[n]);
    }
    printed[n] = 1;
    const auto& node = fs.node(n);
    if (is_plain_list_cell(n)) {
      out += '<';
      NodeId cur = n;
      bool first = true;
      for (;;) {
        const auto& cell = fs.node(cur);
        if (cell.type == sig.empty_list_type()) break;
        if (!first) out += ", ";
        first = false;
        emit(*cell.arc(sig.first_feature()), out);
        NodeId rest = *cell.arc(sig.rest_feature());
        if (indegree[rest] > 1 || !is_plain_list_cell(rest)) {
          out += " | ";
          emit(rest, out);
          break;
        }
        printed[rest] = 1;
        cur = rest;
      }
      out += '>';
      return;
    }
    std::string type = sig.name(node.type) + (node.bound ? "!" : "");
    if (node.arcs.empty()) {
      if (node.type == sig.top() && !node.bound) {
        out += "[]";
      } else {
        out += type;
      }
      return;
    }
    out += '[';
    bool first = true;
    if (node.type != sig.top() || node.bound) {
      out += type;
      first = false;
    }
    for (const auto& [f, t] : node.arcs) {
      if (!first) out += ", ";
      first = false;
      out += sig.feature_name(f) + " ";
      emit(t, out);
    }
    out += ']';
  };

  std::vector<std::string> out;
  for (NodeId r : fs.roots()) {
    std::string s;
    emit(r, s);
    out.push_back(std::move(s));
  }
  return out;
}

std::string write_avm(const FeatureStructure& fs) { return write_avm_roots(fs).front(); }

}  // namespace tfsprime
