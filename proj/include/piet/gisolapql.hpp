// Copyright 2026 The Piet Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#ifndef PIET_GISOLAPQL_HPP
#define PIET_GISOLAPQL_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "piet/dims.hpp"
#include "piet/engine.hpp"

namespace piet {

class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos)), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

// -- GIS query AST ------------------------------------------------------------

struct GisOpArg {
  enum Kind { LayerRef, MemberRef } kind = LayerRef;
  std::string layer;
  std::int64_t gid = 0;  // MemberRef only
};

struct GisOp {
  std::string name;  // intersection | contains
  GisOpArg a, b;
  CellKind level = CellKind::SubNode;
};

struct GisSelectItem {
  enum Kind { Layer, Measure } kind = Layer;
  std::string name;
};

/// WHERE is a disjunction of conjunctions ("and" binds tighter than "or").
struct GisQueryAst {
  std::vector<GisSelectItem> select;
  std::string from;
  std::vector<std::vector<GisOp>> where;
};

// -- mini-MDX AST ----------------------------------------------------------------

struct MdxMember {
  std::vector<std::string> path;  // e.g. {"Store","All Stores","USA","CA"}
  bool children = false;

  friend bool operator==(const MdxMember& a, const MdxMember& b) {
    return a.path == b.path && a.children == b.children;
  }
};

struct MdxTuple {
  std::vector<MdxMember> members;
};

struct MdxSet;
using MdxSetPtr = std::shared_ptr<MdxSet>;

struct MdxSet {
  enum Kind { Literal, Union, Crossjoin, Hierarchize } kind = Literal;
  std::vector<MdxTuple> tuples;  // Literal
  MdxSetPtr lhs, rhs;            // Union/Crossjoin; Hierarchize uses lhs
};

struct MdxAst {
  std::vector<MdxMember> columns;  // measures
  MdxSetPtr rows;
  std::string cube;
  std::optional<MdxMember> slicer;
};

struct GisolapQuery {
  std::optional<GisQueryAst> gis;
  std::optional<MdxAst> olap;
};

/// GIS-Query | OLAP-Query. A missing OLAP part is a pure GIS query; a text
/// with "on columns" and no pipe is pure mini-MDX.
GisolapQuery parse(const std::string& text);

std::string print(const GisQueryAst& ast);
std::string print(const MdxAst& ast);
std::string print(const MdxSet& set);

// -- GIS planning / execution ------------------------------------------------------

struct TupleTable {
  std::vector<std::string> columns;  // layer names (join variables)
  std::vector<std::vector<std::int64_t>> rows;
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct GisPlanResult {
  TupleTable joined;
  ResultTable result;
  std::vector<std::string> warnings;
};

/// Evaluates one WHERE op into id pairs. Bound to the overlay engine, the
/// R-tree join or the naive scan by the caller.
using OpEvaluator = std::function<std::vector<IdPair>(const GisOp&)>;

/// Conjunctions become natural joins on shared layer variables, disjunctions
/// unions; SELECT projects layers and aggregates measures. A selected layer
/// absent from every op yields all its members with a warning; ops sharing no
/// variable produce a cross product with a warning.
GisPlanResult plan_and_execute(const GisQueryAst& ast, const OpEvaluator& op_eval,
                               const PietSchema& schema, const FactRows& facts,
                               const std::vector<Layer>& layers);

// -- OLAP rewrite and evaluation ------------------------------------------------------

class mdx_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Builds Crossjoin(Hierarchize(Union(...{<All path>.<member>.Children}...)),
/// original rows) from the GIS result ids, in ascending gid order. Unmapped
/// gids are skipped with a warning.
MdxAst rewrite_olap(const std::vector<std::int64_t>& gis_ids,
                    const std::vector<GisOlapRow>& mapping, const LayerDesc& layer,
                    const StarSchema& star, const MdxAst& original,
                    std::vector<std::string>* warnings = nullptr);

struct PivotResult {
  std::vector<std::vector<std::string>> row_headers;  // member paths per row
  std::vector<std::string> col_headers;               // measure names
  std::vector<std::vector<double>> body;
};

PivotResult eval_mdx(const MdxAst& mdx, const StarSchema& star);

struct DrillOutcome {
  MdxAst mdx;
  bool changed = false;
  std::string notice;
};

/// Replaces the member by member.Children (drill) or restores its parent
/// (roll-up). Drilling a leaf member leaves the query unchanged with a notice.
DrillOutcome drill_down(const MdxAst& mdx, const StarSchema& star,
                        const std::vector<std::string>& member_path);
DrillOutcome roll_up(const MdxAst& mdx, const StarSchema& star,
                     const std::vector<std::string>& member_path);

}  // namespace piet

#endif  // PIET_GISOLAPQL_HPP
