// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "piet/gisolapql.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace piet {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), ::tolower);
  return s;
}

// -- tokenizer -------------------------------------------------------------------

struct Token {
  enum Kind { Ident, Bracket, Number, Punct, End } kind = End;
  std::string text;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }
  bool at_punct(const char* p) const {
    return tok_.kind == Token::Punct && tok_.text == p;
  }
  bool at_keyword(const char* kw) const {
    return tok_.kind == Token::Ident && lower(tok_.text) == kw;
  }
  Token expect_punct(const char* p) {
    if (!at_punct(p))
      throw parse_error(std::string("expected '") + p + "', found '" + tok_.text + "'",
                        tok_.pos);
    return take();
  }
  Token expect_keyword(const char* kw) {
    if (!at_keyword(kw))
      throw parse_error(std::string("expected ") + kw + ", found '" + tok_.text + "'",
                        tok_.pos);
    return take();
  }
  Token expect_ident() {
    if (tok_.kind != Token::Ident)
      throw parse_error("expected identifier, found '" + tok_.text + "'", tok_.pos);
    return take();
  }

 private:
  void advance() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
    tok_ = {};
    tok_.pos = i_;
    if (i_ >= text_.size()) {
      tok_.kind = Token::End;
      return;
    }
    char c = text_[i_];
    if (c == '[') {
      std::size_t end = text_.find(']', i_);
      if (end == std::string::npos) throw parse_error("unterminated '['", i_);
      tok_.kind = Token::Bracket;
      tok_.text = text_.substr(i_ + 1, end - i_ - 1);
      i_ = end + 1;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i_;
      while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
      tok_.kind = Token::Number;
      tok_.text = text_.substr(i_, j - i_);
      i_ = j;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[j])) ||
                                  text_[j] == '_' || text_[j] == '-'))
        ++j;
      tok_.kind = Token::Ident;
      tok_.text = text_.substr(i_, j - i_);
      i_ = j;
      return;
    }
    tok_.kind = Token::Punct;
    tok_.text = std::string(1, c);
    ++i_;
  }

  const std::string& text_;
  std::size_t i_ = 0;
  Token tok_;
};

CellKind parse_subplevel(const std::string& name, std::size_t pos) {
  std::string n = lower(name);
  if (n == "point") return CellKind::SubNode;
  if (n == "linestring") return CellKind::SubLine;
  if (n == "polygon") return CellKind::SubPolygon;
  throw parse_error("bad subplevel '" + name + "' (Point | LineString | Polygon)", pos);
}

const char* subplevel_name(CellKind k) {
  switch (k) {
    case CellKind::SubNode: return "Point";
    case CellKind::SubLine: return "LineString";
    case CellKind::SubPolygon: return "Polygon";
  }
  return "?";
}

// -- GIS part ----------------------------------------------------------------------

GisOpArg parse_op_arg(Lexer& lex) {
  Token t = lex.expect_ident();
  GisOpArg arg;
  if (lower(t.text) == "layer") {
    lex.expect_punct(".");
    arg.kind = GisOpArg::LayerRef;
    arg.layer = lex.expect_ident().text;
    return arg;
  }
  // member-restricted operand: <layer>.<gid>
  lex.expect_punct(".");
  Token num = lex.take();
  if (num.kind != Token::Number)
    throw parse_error("expected member id after '" + t.text + ".'", num.pos);
  arg.kind = GisOpArg::MemberRef;
  arg.layer = t.text;
  arg.gid = std::stoll(num.text);
  return arg;
}

GisOp parse_gis_op(Lexer& lex) {
  Token name = lex.expect_ident();
  std::string op = lower(name.text);
  if (op != "intersection" && op != "contains")
    throw parse_error("unknown operation '" + name.text + "'", name.pos);
  GisOp out;
  out.name = op;
  lex.expect_punct("(");
  out.a = parse_op_arg(lex);
  lex.expect_punct(",");
  out.b = parse_op_arg(lex);
  lex.expect_punct(",");
  Token sub = lex.expect_ident();
  if (lower(sub.text) != "subplevel")
    throw parse_error("expected subplevel.<level>", sub.pos);
  lex.expect_punct(".");
  Token lvl = lex.take();
  if (lvl.kind != Token::Ident) throw parse_error("expected subplevel name", lvl.pos);
  out.level = parse_subplevel(lvl.text, lvl.pos);
  lex.expect_punct(")");
  return out;
}

GisQueryAst parse_gis_query(const std::string& text) {
  Lexer lex(text);
  GisQueryAst ast;
  lex.expect_keyword("select");
  if (lex.at_punct(";"))
    throw parse_error("empty SELECT list", lex.peek().pos);
  for (;;) {
    Token t = lex.expect_ident();
    std::string kind = lower(t.text);
    if (kind != "layer" && kind != "measure")
      throw parse_error("SELECT items are layer.<name> or measure.<name>", t.pos);
    lex.expect_punct(".");
    GisSelectItem item;
    item.kind = kind == "layer" ? GisSelectItem::Layer : GisSelectItem::Measure;
    item.name = lex.expect_ident().text;
    ast.select.push_back(item);
    if (lex.at_punct(",")) {
      lex.take();
      continue;
    }
    break;
  }
  lex.expect_punct(";");
  lex.expect_keyword("from");
  ast.from = lex.expect_ident().text;
  lex.expect_punct(";");
  lex.expect_keyword("where");
  std::vector<GisOp> conj;
  for (;;) {
    conj.push_back(parse_gis_op(lex));
    if (lex.at_keyword("and")) {
      lex.take();
      continue;
    }
    if (lex.at_keyword("or")) {
      lex.take();
      ast.where.push_back(std::move(conj));
      conj.clear();
      continue;
    }
    break;
  }
  ast.where.push_back(std::move(conj));
  lex.expect_punct(";");
  if (lex.peek().kind != Token::End)
    throw parse_error("trailing input after WHERE clause", lex.peek().pos);
  return ast;
}

// -- MDX part ----------------------------------------------------------------------

MdxMember parse_member(Lexer& lex) {
  MdxMember m;
  for (;;) {
    Token t = lex.take();
    if (t.kind != Token::Bracket)
      throw parse_error("expected [member] segment", t.pos);
    m.path.push_back(t.text);
    if (lex.at_punct(".")) {
      lex.take();
      if (lex.peek().kind == Token::Bracket) continue;
      Token kw = lex.expect_ident();
      if (lower(kw.text) != "children")
        throw parse_error("only .Children is supported after a member", kw.pos);
      m.children = true;
    }
    break;
  }
  return m;
}

MdxSetPtr parse_set(Lexer& lex);

MdxTuple parse_tuple(Lexer& lex) {
  MdxTuple t;
  if (lex.at_punct("(")) {
    lex.take();
    for (;;) {
      t.members.push_back(parse_member(lex));
      if (lex.at_punct(",")) {
        lex.take();
        continue;
      }
      break;
    }
    lex.expect_punct(")");
  } else {
    t.members.push_back(parse_member(lex));
  }
  return t;
}

MdxSetPtr parse_set(Lexer& lex) {
  auto set = std::make_shared<MdxSet>();
  if (lex.at_punct("{")) {
    lex.take();
    set->kind = MdxSet::Literal;
    if (!lex.at_punct("}")) {
      for (;;) {
        set->tuples.push_back(parse_tuple(lex));
        if (lex.at_punct(",")) {
          lex.take();
          continue;
        }
        break;
      }
    }
    lex.expect_punct("}");
    return set;
  }
  Token t = lex.expect_ident();
  std::string fn = lower(t.text);
  if (fn == "union" || fn == "crossjoin") {
    set->kind = fn == "union" ? MdxSet::Union : MdxSet::Crossjoin;
    lex.expect_punct("(");
    set->lhs = parse_set(lex);
    lex.expect_punct(",");
    set->rhs = parse_set(lex);
    lex.expect_punct(")");
    return set;
  }
  if (fn == "hierarchize") {
    set->kind = MdxSet::Hierarchize;
    lex.expect_punct("(");
    set->lhs = parse_set(lex);
    lex.expect_punct(")");
    return set;
  }
  throw parse_error("unsupported MDX construct '" + t.text + "'", t.pos);
}

MdxAst parse_mdx(const std::string& text) {
  Lexer lex(text);
  MdxAst ast;
  lex.expect_keyword("select");
  // columns: a literal set of measures
  MdxSetPtr cols = parse_set(lex);
  if (cols->kind != MdxSet::Literal)
    throw parse_error("measures on columns must be a literal set", 0);
  for (const MdxTuple& t : cols->tuples) {
    if (t.members.size() != 1)
      throw parse_error("column tuples must be single measures", 0);
    ast.columns.push_back(t.members[0]);
  }
  lex.expect_keyword("on");
  lex.expect_keyword("columns");
  lex.expect_punct(",");
  ast.rows = parse_set(lex);
  lex.expect_keyword("on");
  lex.expect_keyword("rows");
  lex.expect_keyword("from");
  Token cube = lex.take();
  if (cube.kind != Token::Bracket)
    throw parse_error("expected [cube] after FROM", cube.pos);
  ast.cube = cube.text;
  if (lex.at_keyword("where")) {
    lex.take();
    ast.slicer = parse_member(lex);
  }
  if (lex.peek().kind != Token::End)
    throw parse_error("trailing input after MDX query", lex.peek().pos);
  return ast;
}

}  // namespace

GisolapQuery parse(const std::string& text) {
  GisolapQuery q;
  std::size_t pipe = text.find('|');
  if (pipe != std::string::npos) {
    q.gis = parse_gis_query(text.substr(0, pipe));
    q.olap = parse_mdx(text.substr(pipe + 1));
    return q;
  }
  if (lower(text).find("on columns") != std::string::npos) {
    q.olap = parse_mdx(text);
    return q;
  }
  q.gis = parse_gis_query(text);
  return q;
}

// -- printing ---------------------------------------------------------------------

namespace {

std::string print_arg(const GisOpArg& a) {
  if (a.kind == GisOpArg::LayerRef) return "layer." + a.layer;
  return a.layer + "." + std::to_string(a.gid);
}

std::string print_member(const MdxMember& m) {
  std::string out;
  for (const std::string& p : m.path) out += "[" + p + "].";
  out.pop_back();
  if (m.children) out += ".Children";
  return out;
}

}  // namespace

std::string print(const GisQueryAst& ast) {
  std::string out = "SELECT ";
  for (std::size_t i = 0; i < ast.select.size(); ++i) {
    if (i) out += ", ";
    out += (ast.select[i].kind == GisSelectItem::Layer ? "layer." : "measure.") +
           ast.select[i].name;
  }
  out += "; FROM " + ast.from + "; WHERE ";
  for (std::size_t d = 0; d < ast.where.size(); ++d) {
    if (d) out += " or ";
    for (std::size_t c = 0; c < ast.where[d].size(); ++c) {
      if (c) out += " and ";
      const GisOp& op = ast.where[d][c];
      out += op.name + "(" + print_arg(op.a) + ", " + print_arg(op.b) + ", subplevel." +
             subplevel_name(op.level) + ")";
    }
  }
  out += ";";
  return out;
}

std::string print(const MdxSet& set) {
  switch (set.kind) {
    case MdxSet::Literal: {
      std::string out = "{";
      for (std::size_t i = 0; i < set.tuples.size(); ++i) {
        if (i) out += ", ";
        const MdxTuple& t = set.tuples[i];
        if (t.members.size() > 1) out += "(";
        for (std::size_t m = 0; m < t.members.size(); ++m) {
          if (m) out += ", ";
          out += print_member(t.members[m]);
        }
        if (t.members.size() > 1) out += ")";
      }
      return out + "}";
    }
    case MdxSet::Union:
      return "Union(" + print(*set.lhs) + ", " + print(*set.rhs) + ")";
    case MdxSet::Crossjoin:
      return "Crossjoin(" + print(*set.lhs) + ", " + print(*set.rhs) + ")";
    case MdxSet::Hierarchize:
      return "Hierarchize(" + print(*set.lhs) + ")";
  }
  return "";
}

std::string print(const MdxAst& ast) {
  std::string out = "select {";
  for (std::size_t i = 0; i < ast.columns.size(); ++i) {
    if (i) out += ", ";
    out += print_member(ast.columns[i]);
  }
  out += "} on columns, " + print(*ast.rows) + " on rows from [" + ast.cube + "]";
  if (ast.slicer) out += " where " + print_member(*ast.slicer);
  return out;
}

// -- GIS planning -----------------------------------------------------------------

namespace {

TupleTable join_tables(const TupleTable& a, const TupleTable& b,
                       std::vector<std::string>* warnings) {
  // shared columns
  std::vector<std::size_t> ia, ib;
  for (std::size_t i = 0; i < a.columns.size(); ++i)
    for (std::size_t j = 0; j < b.columns.size(); ++j)
      if (a.columns[i] == b.columns[j]) {
        ia.push_back(i);
        ib.push_back(j);
      }
  if (ia.empty() && warnings)
    warnings->push_back("ops share no layer; cross product");

  TupleTable out;
  out.columns = a.columns;
  std::vector<std::size_t> extra;
  for (std::size_t j = 0; j < b.columns.size(); ++j)
    if (std::find(ib.begin(), ib.end(), j) == ib.end()) {
      out.columns.push_back(b.columns[j]);
      extra.push_back(j);
    }

  std::multimap<std::vector<std::int64_t>, const std::vector<std::int64_t>*> index;
  for (const auto& row : b.rows) {
    std::vector<std::int64_t> key;
    for (std::size_t j : ib) key.push_back(row[j]);
    index.insert({key, &row});
  }
  for (const auto& row : a.rows) {
    std::vector<std::int64_t> key;
    for (std::size_t i : ia) key.push_back(row[i]);
    auto [lo, hi] = index.equal_range(key);
    for (auto it = lo; it != hi; ++it) {
      std::vector<std::int64_t> merged = row;
      for (std::size_t j : extra) merged.push_back((*it->second)[j]);
      out.rows.push_back(std::move(merged));
    }
  }
  return out;
}

void dedup_rows(TupleTable& t) {
  std::sort(t.rows.begin(), t.rows.end());
  t.rows.erase(std::unique(t.rows.begin(), t.rows.end()), t.rows.end());
}

TupleTable table_of_op(const GisOp& op, const OpEvaluator& op_eval) {
  std::vector<IdPair> pairs = op_eval(op);
  if (op.a.kind == GisOpArg::MemberRef) {
    std::vector<IdPair> kept;
    for (const IdPair& p : pairs)
      if (p.first == op.a.gid) kept.push_back(p);
    pairs = std::move(kept);
  }
  if (op.b.kind == GisOpArg::MemberRef) {
    std::vector<IdPair> kept;
    for (const IdPair& p : pairs)
      if (p.second == op.b.gid) kept.push_back(p);
    pairs = std::move(kept);
  }
  TupleTable t;
  t.columns = {op.a.layer, op.b.layer};
  for (const IdPair& p : pairs) t.rows.push_back({p.first, p.second});
  dedup_rows(t);
  return t;
}

std::vector<std::int64_t> all_gids(const Layer& layer) {
  std::vector<std::int64_t> out;
  for (const PointFeature& f : layer.points) out.push_back(f.gid);
  for (const Polyline& pl : layer.polylines) out.push_back(pl.gid);
  for (const Polygon& pg : layer.polygons) out.push_back(pg.gid);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

GisPlanResult plan_and_execute(const GisQueryAst& ast, const OpEvaluator& op_eval,
                               const PietSchema& schema, const FactRows& facts,
                               const std::vector<Layer>& layers) {
  GisPlanResult out;

  // evaluate each disjunct as a chain of natural joins, then union
  TupleTable combined;
  bool first_disjunct = true;
  for (const std::vector<GisOp>& conj : ast.where) {
    TupleTable t;
    bool first = true;
    for (const GisOp& op : conj) {
      TupleTable ot = table_of_op(op, op_eval);
      t = first ? std::move(ot) : join_tables(t, ot, &out.warnings);
      first = false;
    }
    if (first_disjunct) {
      combined = std::move(t);
      first_disjunct = false;
    } else {
      if (combined.columns != t.columns) {
        // align columns when possible
        if (std::set<std::string>(combined.columns.begin(), combined.columns.end()) !=
            std::set<std::string>(t.columns.begin(), t.columns.end()))
          throw mdx_error("disjuncts produce different layer sets");
        TupleTable aligned;
        aligned.columns = combined.columns;
        for (const auto& row : t.rows) {
          std::vector<std::int64_t> r;
          for (const std::string& col : combined.columns) {
            std::size_t j = std::find(t.columns.begin(), t.columns.end(), col) -
                            t.columns.begin();
            r.push_back(row[j]);
          }
          aligned.rows.push_back(std::move(r));
        }
        t = std::move(aligned);
      }
      combined.rows.insert(combined.rows.end(), t.rows.begin(), t.rows.end());
    }
  }
  dedup_rows(combined);

  // layers selected but absent from every op: cross product over all members
  for (const GisSelectItem& item : ast.select) {
    if (item.kind != GisSelectItem::Layer) continue;
    if (std::find(combined.columns.begin(), combined.columns.end(), item.name) !=
        combined.columns.end())
      continue;
    const Layer* layer = nullptr;
    for (const Layer& l : layers)
      if (l.name == item.name) layer = &l;
    if (!layer) throw mdx_error("unknown layer in SELECT: " + item.name);
    out.warnings.push_back("layer " + item.name +
                           " not constrained by WHERE; yielding all members");
    TupleTable t;
    t.columns = {item.name};
    for (std::int64_t gid : all_gids(*layer)) t.rows.push_back({gid});
    combined = combined.columns.empty() ? std::move(t)
                                        : join_tables(combined, t, nullptr);
  }
  out.joined = combined;

  // projection + measures
  std::vector<std::string> proj_layers;
  std::vector<const MeasureDesc*> measures;
  for (const GisSelectItem& item : ast.select) {
    if (item.kind == GisSelectItem::Layer) {
      proj_layers.push_back(item.name);
    } else {
      const MeasureDesc* m = schema.measure(item.name);
      if (!m) throw mdx_error("unknown measure " + item.name);
      measures.push_back(m);
    }
  }

  ResultTable& rt = out.result;
  rt.columns = proj_layers;
  for (const MeasureDesc* m : measures) rt.columns.push_back(m->name);

  auto col_index = [&](const std::string& name) -> std::size_t {
    auto it = std::find(combined.columns.begin(), combined.columns.end(), name);
    if (it == combined.columns.end())
      throw mdx_error("measure layer " + name + " not present in WHERE ops");
    return static_cast<std::size_t>(it - combined.columns.begin());
  };

  if (measures.empty()) {
    std::set<std::vector<std::int64_t>> seen;
    for (const auto& row : combined.rows) {
      std::vector<std::int64_t> key;
      for (const std::string& col : proj_layers) key.push_back(row[col_index(col)]);
      if (!seen.insert(key).second) continue;
      std::vector<std::string> r;
      for (std::int64_t v : key) r.push_back(std::to_string(v));
      rt.rows.push_back(std::move(r));
    }
    return out;
  }

  // group rows by projected layers, aggregate measure layers per group
  std::map<std::vector<std::int64_t>, std::vector<std::set<std::int64_t>>> groups;
  for (const auto& row : combined.rows) {
    std::vector<std::int64_t> key;
    for (const std::string& col : proj_layers) key.push_back(row[col_index(col)]);
    auto& sets = groups[key];
    sets.resize(measures.size());
    for (std::size_t m = 0; m < measures.size(); ++m)
      sets[m].insert(row[col_index(measures[m]->layer)]);
  }
  for (const auto& [key, sets] : groups) {
    std::vector<std::string> r;
    for (std::int64_t v : key) r.push_back(std::to_string(v));
    for (std::size_t m = 0; m < measures.size(); ++m) {
      const MeasureDesc* md = measures[m];
      if (md->aggregator == "count") {
        r.push_back(std::to_string(sets[m].size()));
      } else {
        double sum = 0, mn = 0, mx = 0;
        std::size_t n = 0;
        for (std::int64_t gid : sets[m]) {
          auto it = facts.find({md->layer, gid});
          if (it == facts.end()) continue;
          auto vit = it->second.find(md->property);
          if (vit == it->second.end()) continue;
          double v = vit->second;
          if (n == 0) mn = mx = v;
          mn = std::min(mn, v);
          mx = std::max(mx, v);
          sum += v;
          ++n;
        }
        double val = 0;
        if (md->aggregator == "sum") val = sum;
        else if (md->aggregator == "avg") val = n ? sum / n : 0;
        else if (md->aggregator == "min") val = mn;
        else if (md->aggregator == "max") val = mx;
        std::ostringstream os;
        os << val;
        r.push_back(os.str());
      }
    }
    rt.rows.push_back(std::move(r));
  }
  return out;
}

// -- OLAP rewrite -----------------------------------------------------------------

MdxAst rewrite_olap(const std::vector<std::int64_t>& gis_ids,
                    const std::vector<GisOlapRow>& mapping, const LayerDesc& layer,
                    const StarSchema& star, const MdxAst& original,
                    std::vector<std::string>* warnings) {
  if (!layer.olap_relation.present)
    throw mdx_error("layer " + layer.name + " has no OLAP relation");
  const OlapRelationDesc& rel = layer.olap_relation;
  const OlapDimension* dim = star.dimension(rel.olapDimensionName);
  if (!dim) throw mdx_error("unknown OLAP dimension " + rel.olapDimensionName);

  int level_idx = -1;
  for (std::size_t i = 0; i < dim->levels.size(); ++i)
    if (dim->levels[i] == rel.olapLevelName) level_idx = static_cast<int>(i) + 1;
  if (level_idx < 0) throw mdx_error("unknown OLAP level " + rel.olapLevelName);

  std::vector<std::int64_t> ids = gis_ids;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<MdxMember> members;
  for (std::int64_t gid : ids) {
    const GisOlapRow* row = nullptr;
    for (const GisOlapRow& r : mapping)
      if (r.gisid == gid) row = &r;
    if (!row) {
      if (warnings)
        warnings->push_back("gis id " + std::to_string(gid) + " has no OLAP mapping");
      continue;
    }
    int member = -1;
    for (std::size_t m = 0; m < dim->members.size(); ++m)
      if (dim->members[m].level == level_idx && dim->members[m].name == row->olapid)
        member = static_cast<int>(m);
    if (member < 0) {
      if (warnings)
        warnings->push_back("olap id '" + row->olapid + "' not found at level " +
                            rel.olapLevelName);
      continue;
    }
    // full path, e.g. [Store].[All Stores].[USA].[CA], with .Children
    MdxMember mm;
    mm.path.push_back(dim->name);
    std::vector<std::string> rev;
    for (int cur = member; cur >= 0; cur = dim->members[cur].parent)
      rev.push_back(dim->members[cur].name);
    mm.path.insert(mm.path.end(), rev.rbegin(), rev.rend());
    mm.children = true;
    members.push_back(std::move(mm));
  }

  // fold with Union, wrap in Hierarchize, crossjoin with the original rows
  MdxSetPtr acc;
  for (const MdxMember& m : members) {
    auto lit = std::make_shared<MdxSet>();
    lit->kind = MdxSet::Literal;
    lit->tuples.push_back({{m}});
    if (!acc) {
      acc = lit;
    } else {
      auto u = std::make_shared<MdxSet>();
      u->kind = MdxSet::Union;
      u->lhs = acc;
      u->rhs = lit;
      acc = u;
    }
  }
  if (!acc) {
    acc = std::make_shared<MdxSet>();
    acc->kind = MdxSet::Literal;  // empty rows set
  }
  auto hier = std::make_shared<MdxSet>();
  hier->kind = MdxSet::Hierarchize;
  hier->lhs = acc;
  auto cross = std::make_shared<MdxSet>();
  cross->kind = MdxSet::Crossjoin;
  cross->lhs = hier;
  cross->rhs = original.rows;

  MdxAst out = original;
  out.rows = cross;
  return out;
}

// -- MDX evaluation ----------------------------------------------------------------

namespace {

struct ResolvedMember {
  const OlapDimension* dim;
  int member;
};
using ResolvedTuple = std::vector<ResolvedMember>;

ResolvedMember resolve_member(const MdxMember& m, const StarSchema& star,
                              std::size_t skip_tail = 0) {
  if (m.path.size() < 2) throw mdx_error("member path too short");
  const OlapDimension* dim = star.dimension(m.path[0]);
  if (!dim) throw mdx_error("unknown dimension [" + m.path[0] + "]");
  std::vector<std::string> below(m.path.begin() + 1, m.path.end() - skip_tail);
  int idx = dim->resolve(below);
  if (idx < 0) {
    std::string full;
    for (const std::string& p : m.path) full += "[" + p + "].";
    throw mdx_error("unknown member path " + full);
  }
  return {dim, idx};
}

void expand_tuple(const MdxTuple& tuple, const StarSchema& star,
                  std::vector<ResolvedTuple>& out) {
  std::vector<std::vector<ResolvedMember>> options;
  for (const MdxMember& m : tuple.members) {
    ResolvedMember rm = resolve_member(m, star);
    std::vector<ResolvedMember> opts;
    if (m.children) {
      for (int c : rm.dim->members[rm.member].children) opts.push_back({rm.dim, c});
    } else {
      opts.push_back(rm);
    }
    options.push_back(std::move(opts));
  }
  std::vector<ResolvedTuple> acc{{}};
  for (const auto& opts : options) {
    std::vector<ResolvedTuple> next;
    for (const ResolvedTuple& t : acc)
      for (const ResolvedMember& o : opts) {
        ResolvedTuple nt = t;
        nt.push_back(o);
        next.push_back(std::move(nt));
      }
    acc = std::move(next);
  }
  for (ResolvedTuple& t : acc) out.push_back(std::move(t));
}

bool same_tuple(const ResolvedTuple& a, const ResolvedTuple& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].dim != b[i].dim || a[i].member != b[i].member) return false;
  return true;
}

std::vector<ResolvedTuple> eval_set(const MdxSet& set, const StarSchema& star) {
  switch (set.kind) {
    case MdxSet::Literal: {
      std::vector<ResolvedTuple> out;
      for (const MdxTuple& t : set.tuples) expand_tuple(t, star, out);
      return out;
    }
    case MdxSet::Union: {
      std::vector<ResolvedTuple> out = eval_set(*set.lhs, star);
      for (const ResolvedTuple& t : eval_set(*set.rhs, star)) {
        bool dup = false;
        for (const ResolvedTuple& e : out)
          if (same_tuple(e, t)) dup = true;
        if (!dup) out.push_back(t);
      }
      return out;
    }
    case MdxSet::Crossjoin: {
      std::vector<ResolvedTuple> l = eval_set(*set.lhs, star);
      std::vector<ResolvedTuple> r = eval_set(*set.rhs, star);
      std::vector<ResolvedTuple> out;
      for (const ResolvedTuple& a : l)
        for (const ResolvedTuple& b : r) {
          ResolvedTuple t = a;
          t.insert(t.end(), b.begin(), b.end());
          out.push_back(std::move(t));
        }
      return out;
    }
    case MdxSet::Hierarchize: {
      std::vector<ResolvedTuple> out = eval_set(*set.lhs, star);
      // depth-first hierarchy order per dimension, lexicographic over the tuple
      std::map<const OlapDimension*, std::vector<int>> orders;
      std::stable_sort(out.begin(), out.end(),
                       [&](const ResolvedTuple& a, const ResolvedTuple& b) {
                         for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
                           auto& oa = orders[a[i].dim];
                           if (oa.empty()) oa = a[i].dim->dfs_order();
                           auto& ob = orders[b[i].dim];
                           if (ob.empty()) ob = b[i].dim->dfs_order();
                           int ka = oa[a[i].member];
                           int kb = ob[b[i].member];
                           if (ka != kb) return ka < kb;
                         }
                         return a.size() < b.size();
                       });
      return out;
    }
  }
  return {};
}

}  // namespace

PivotResult eval_mdx(const MdxAst& mdx, const StarSchema& star) {
  if (!star.cube.empty() && mdx.cube != star.cube)
    throw mdx_error("unknown cube [" + mdx.cube + "]");
  PivotResult out;
  std::vector<std::string> measure_names;
  for (const MdxMember& m : mdx.columns) {
    if (m.path.size() != 2 || m.path[0] != "Measures")
      throw mdx_error("columns must be [Measures].[...] members");
    if (std::find(star.measures.begin(), star.measures.end(), m.path[1]) ==
        star.measures.end())
      throw mdx_error("unknown measure [" + m.path[1] + "]");
    measure_names.push_back(m.path[1]);
  }
  out.col_headers = measure_names;

  std::optional<ResolvedMember> slicer;
  if (mdx.slicer) slicer = resolve_member(*mdx.slicer, star);

  std::vector<ResolvedTuple> rows = eval_set(*mdx.rows, star);
  for (const ResolvedTuple& tuple : rows) {
    std::vector<std::string> header;
    for (const ResolvedMember& rm : tuple) header.push_back(rm.dim->full_path(rm.member));
    out.row_headers.push_back(header);

    std::vector<double> vals;
    for (const std::string& measure : measure_names) {
      double sum = 0.0;
      for (const StarFactRow& fact : star.facts) {
        bool match = true;
        auto member_matches = [&](const ResolvedMember& rm) {
          auto it = fact.leaf.find(rm.dim->name);
          if (it == fact.leaf.end()) return false;
          return rm.dim->is_descendant_or_self(it->second, rm.member);
        };
        for (const ResolvedMember& rm : tuple)
          if (!member_matches(rm)) match = false;
        if (match && slicer && !member_matches(*slicer)) match = false;
        if (!match) continue;
        auto mit = fact.measures.find(measure);
        if (mit != fact.measures.end()) sum += mit->second;
      }
      vals.push_back(sum);
    }
    out.body.push_back(std::move(vals));
  }
  return out;
}

// -- drill / roll-up ---------------------------------------------------------------

namespace {

// rewrite literal sets in place via a tuple-member transformer
MdxSetPtr map_sets(const MdxSetPtr& set,
                   const std::function<std::vector<MdxMember>(const MdxMember&)>& fn) {
  auto out = std::make_shared<MdxSet>(*set);
  if (set->kind == MdxSet::Literal) {
    out->tuples.clear();
    for (const MdxTuple& t : set->tuples) {
      if (t.members.size() != 1) {
        out->tuples.push_back(t);
        continue;
      }
      for (const MdxMember& repl : fn(t.members[0])) out->tuples.push_back({{repl}});
    }
    return out;
  }
  if (set->lhs) out->lhs = map_sets(set->lhs, fn);
  if (set->rhs) out->rhs = map_sets(set->rhs, fn);
  return out;
}

}  // namespace

DrillOutcome drill_down(const MdxAst& mdx, const StarSchema& star,
                        const std::vector<std::string>& member_path) {
  DrillOutcome out;
  out.mdx = mdx;
  MdxMember target;
  target.path = member_path;
  ResolvedMember rm = resolve_member(target, star);
  if (rm.dim->members[rm.member].children.empty()) {
    out.notice = "member is a leaf; nothing to drill into";
    return out;
  }
  bool changed = false;
  out.mdx.rows = map_sets(mdx.rows, [&](const MdxMember& m) -> std::vector<MdxMember> {
    if (m.path == member_path && !m.children) {
      MdxMember d = m;
      d.children = true;
      changed = true;
      return {d};
    }
    // the member may only exist through its parent's .Children expansion:
    // materialize the siblings and drill the target
    std::vector<std::string> parent(member_path.begin(), member_path.end() - 1);
    if (m.children && m.path == parent) {
      std::vector<MdxMember> repl;
      for (int c : rm.dim->members[rm.dim->members[rm.member].parent].children) {
        MdxMember sib;
        sib.path = parent;
        sib.path.push_back(rm.dim->members[c].name);
        sib.children = rm.dim->members[c].name == member_path.back();
        repl.push_back(sib);
      }
      changed = true;
      return repl;
    }
    return {m};
  });
  out.changed = changed;
  if (!changed) out.notice = "member not present in the row set";
  return out;
}

DrillOutcome roll_up(const MdxAst& mdx, const StarSchema& star,
                     const std::vector<std::string>& member_path) {
  DrillOutcome out;
  out.mdx = mdx;
  if (member_path.size() < 3) {
    out.notice = "cannot roll up past the All level";
    return out;
  }
  MdxMember target;
  target.path = member_path;
  resolve_member(target, star);  // validates
  bool changed = false;
  bool emitted = false;
  std::vector<std::string> parent(member_path.begin(), member_path.end() - 1);
  out.mdx.rows = map_sets(mdx.rows, [&](const MdxMember& m) -> std::vector<MdxMember> {
    bool is_descendant = m.path.size() >= member_path.size() &&
                         std::equal(member_path.begin(), member_path.end(), m.path.begin());
    if (is_descendant) {
      changed = true;
      if (emitted) return {};
      emitted = true;
      MdxMember p;
      p.path = member_path;
      p.children = false;
      return {p};
    }
    return {m};
  });
  out.changed = changed;
  if (!changed) out.notice = "no descendants of the member in the row set";
  return out;
}

}  // namespace piet
