#include "pal/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "pal/errors.hpp"

namespace pal {

double Box::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= hi[a] - lo[a];
  return v;
}

bool Box::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int a = 0; a < dim(); ++a)
    if (!(x[a] >= lo[a] && x[a] < hi[a])) return false;
  return true;
}

void Box::validate() const {
  if (lo.empty() || lo.size() != hi.size()) throw ParameterError("box: lo and hi must be non-empty and equally long");
  for (int a = 0; a < dim(); ++a)
    if (!std::isfinite(lo[a]) || !std::isfinite(hi[a]) || !(lo[a] < hi[a]))
      throw ParameterError("box: need finite lo < hi on every axis");
}

Box Box::unit(int dim) { return Box{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)}; }

double overlap_volume(const Box& a, const Box& b) {
  if (a.dim() != b.dim()) throw ParameterError("box overlap: dimension mismatch");
  double v = 1.0;
  for (int k = 0; k < a.dim(); ++k) {
    const double len = std::min(a.hi[k], b.hi[k]) - std::max(a.lo[k], b.lo[k]);
    if (len <= 0.0) return 0.0;
    v *= len;
  }
  return v;
}

bool LabelSet::contains(std::span<const double> x) const {
  if (x.size() != 1) return false;
  const double v = x[0];
  return std::any_of(labels.begin(), labels.end(), [&](int l) { return static_cast<double>(l) == v; });
}

bool region_contains(const Region& r, std::span<const double> x) {
  return std::visit([&](const auto& s) { return s.contains(x); }, r);
}

void PartitionSpec::validate() const {
  if (sets.empty()) throw ParameterError("partition: need at least one set");
  const bool boxes = std::holds_alternative<Box>(sets.front());
  for (const auto& s : sets)
    if (std::holds_alternative<Box>(s) != boxes) throw ParameterError("partition: cannot mix boxes and label sets");
  for (std::size_t a = 0; a < sets.size(); ++a) {
    if (boxes) {
      std::get<Box>(sets[a]).validate();
    } else {
      const auto& l = std::get<LabelSet>(sets[a]).labels;
      if (l.empty()) throw ParameterError("partition: empty label set");
      if (!std::is_sorted(l.begin(), l.end()) || std::adjacent_find(l.begin(), l.end()) != l.end())
        throw ParameterError("partition: label sets must be sorted and distinct");
    }
    for (std::size_t b = 0; b < a; ++b) {
      if (boxes) {
        if (overlap_volume(std::get<Box>(sets[a]), std::get<Box>(sets[b])) > 0.0)
          throw ParameterError("partition: boxes overlap");
      } else {
        const auto& x = std::get<LabelSet>(sets[a]).labels;
        const auto& y = std::get<LabelSet>(sets[b]).labels;
        std::vector<int> common;
        std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
        if (!common.empty()) throw ParameterError("partition: label sets intersect");
      }
    }
  }
}

LatticePoint PartitionSpec::counts(const PointPattern& xi) const {
  LatticePoint c(sets.size(), 0);
  for (const auto& x : xi.points)
    for (std::size_t a = 0; a < sets.size(); ++a)
      if (region_contains(sets[a], x)) {
        ++c[a];
        break;
      }
  return c;
}

PartitionSpec grid_partition(const Box& window, const std::vector<int>& cells) {
  window.validate();
  if (static_cast<int>(cells.size()) != window.dim()) throw ParameterError("grid partition: one cell count per axis");
  for (int c : cells)
    if (c < 1) throw ParameterError("grid partition: cell counts must be >= 1");
  PartitionSpec p;
  std::vector<int> idx(cells.size(), 0);
  while (true) {
    Box b{window.lo, window.hi};
    for (int a = 0; a < window.dim(); ++a) {
      const double w = (window.hi[a] - window.lo[a]) / cells[a];
      b.lo[a] = window.lo[a] + w * idx[a];
      b.hi[a] = idx[a] + 1 == cells[a] ? window.hi[a] : window.lo[a] + w * (idx[a] + 1);
    }
    p.sets.emplace_back(std::move(b));
    int a = window.dim() - 1;
    for (; a >= 0; --a) {
      if (++idx[a] < cells[a]) break;
      idx[a] = 0;
    }
    if (a < 0) break;
  }
  return p;
}

PartitionSpec singleton_partition(const LabelSpace& space) {
  PartitionSpec p;
  for (int l = 0; l < space.size; ++l) p.sets.emplace_back(LabelSet{{l}});
  return p;
}

void to_json(nlohmann::json& j, const Box& b) { j = {{"lo", b.lo}, {"hi", b.hi}}; }

Box box_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParameterError("box must be an object");
  for (const auto& [k, v] : j.items())
    if (k != "lo" && k != "hi") throw ParameterError("box: unknown key '" + k + "'");
  if (!j.contains("lo") || !j.contains("hi")) throw ParameterError("box: need lo and hi");
  Box b{j.at("lo").get<std::vector<double>>(), j.at("hi").get<std::vector<double>>()};
  b.validate();
  return b;
}

void to_json(nlohmann::json& j, const Region& r) {
  if (const auto* b = std::get_if<Box>(&r))
    j = {{"box", *b}};
  else
    j = {{"labels", std::get<LabelSet>(r).labels}};
}

Region region_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.size() != 1) throw ParameterError("region must be {\"box\":...} or {\"labels\":[...]}");
  if (j.contains("box")) return box_from_json(j.at("box"));
  if (j.contains("labels")) {
    LabelSet s{j.at("labels").get<std::vector<int>>()};
    std::sort(s.labels.begin(), s.labels.end());
    return s;
  }
  throw ParameterError("region: unknown kind");
}

void to_json(nlohmann::json& j, const PartitionSpec& p) {
  j = nlohmann::json::object();
  j["sets"] = nlohmann::json::array();
  for (const auto& r : p.sets) j["sets"].push_back(r);
}

PartitionSpec partition_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParameterError("partition must be an object");
  for (const auto& [k, v] : j.items())
    if (k != "sets") throw ParameterError("partition: unknown key '" + k + "'");
  PartitionSpec p;
  for (const auto& r : j.at("sets")) p.sets.push_back(region_from_json(r));
  p.validate();
  return p;
}

Window window_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.size() != 1) throw ParameterError("window must be {\"box\":...} or {\"labels\":n}");
  if (j.contains("box")) return box_from_json(j.at("box"));
  if (j.contains("labels")) {
    const int n = j.at("labels").get<int>();
    if (n < 1) throw ParameterError("label space needs at least one label");
    return LabelSpace{n};
  }
  throw ParameterError("window: unknown kind");
}

void to_json(nlohmann::json& j, const PointPattern& p) { j = p.points; }

}  // namespace pal
