#include "akdyn/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include <json.hpp>

namespace akdyn {

using nlohmann::json;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

json interval_json(const Interval& x) { return json::array({x.lo(), x.hi()}); }

Interval interval_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ReportError("interval must be [lo, hi]");
  return Interval(j[0].get<double>(), j[1].get<double>());
}

json runs_json(const CubicalSet& s) { return row_runs(s); }

CubicalSet runs_from(int depth, const json& j) {
  return from_runs(depth, j.get<std::vector<std::array<std::uint32_t, 3>>>());
}

json matrix_json(const RMatrix& m) {
  json rows = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const Rational& q : row) r.push_back(q.str());
    rows.push_back(std::move(r));
  }
  return rows;
}

RMatrix matrix_from(const json& j) {
  RMatrix m;
  for (const auto& row : j) {
    std::vector<Rational> r;
    for (const auto& q : row) r.emplace_back(q.get<std::string>());
    m.push_back(std::move(r));
  }
  return m;
}

json relation_json(const Relation& r) {
  json out = json::array();
  for (const auto& [p, q] : r) out.push_back(json::array({p, q}));
  return out;
}

Relation relation_from(const json& j) {
  Relation r;
  for (const auto& e : j) r.emplace_back(e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>());
  return r;
}

json params_json(const ParamBox& P) {
  return {{"alpha1", interval_json(P.alpha1)}, {"alpha2", interval_json(P.alpha2)},
          {"beta1", interval_json(P.beta1)},   {"beta2", interval_json(P.beta2)},
          {"epsilon", interval_json(P.epsilon)}, {"n", P.n}};
}

ParamBox params_from(const json& j) {
  ParamBox P;
  P.alpha1 = interval_from(j.at("alpha1"));
  P.alpha2 = interval_from(j.at("alpha2"));
  P.beta1 = interval_from(j.at("beta1"));
  P.beta2 = interval_from(j.at("beta2"));
  P.epsilon = interval_from(j.at("epsilon"));
  P.n = j.at("n").get<unsigned>();
  return P;
}

json pictogram_json(const Pictogram& p) {
  return {{"kind", to_string(p.kind)},
          {"components", p.components},
          {"period", p.period},
          {"flip", to_string(p.flip)},
          {"loops", p.loops},
          {"unstable", unstable_directions(p.kind)}};
}

Pictogram pictogram_from(const json& j) {
  Pictogram p;
  p.kind = index_kind_from_string(j.at("kind").get<std::string>());
  p.components = j.at("components").get<std::uint32_t>();
  p.period = j.at("period").get<std::vector<std::uint32_t>>();
  p.flip = flip_from_string(j.at("flip").get<std::string>());
  p.loops = j.at("loops").get<std::uint32_t>();
  return p;
}

json conley_json(const ConleyIndex& c) {
  json maps = json::array(), leray = json::array();
  for (int k = 0; k < 3; ++k) {
    maps.push_back(matrix_json(c.maps[k]));
    leray.push_back(matrix_json(c.leray[k]));
  }
  return {{"betti", c.homology.betti},
          {"torsion", c.homology.torsion},
          {"maps", maps},
          {"leray", leray},
          {"leray_rank", c.leray_rank}};
}

ConleyIndex conley_from(const json& j) {
  ConleyIndex c;
  c.homology.betti = j.at("betti").get<std::array<std::uint32_t, 3>>();
  c.homology.torsion = j.at("torsion").get<std::array<std::vector<std::string>, 3>>();
  for (int k = 0; k < 3; ++k) {
    c.maps[k] = matrix_from(j.at("maps").at(k));
    c.leray[k] = matrix_from(j.at("leray").at(k));
  }
  c.leray_rank = j.at("leray_rank").get<std::array<std::uint32_t, 3>>();
  return c;
}

json set_json(const MorseSet& s) {
  json j = {{"id", s.id},
            {"cells", runs_json(s.cells)},
            {"isolation", to_string(s.isolation)},
            {"attractor_certificate", s.attractor_certificate},
            {"component_count", s.component_count},
            {"component_map", s.component_map},
            {"pictogram", pictogram_json(s.pictogram)},
            {"index_error", s.index_error}};
  j["index_pair"] = s.index_pair ? json{{"p1", runs_json(s.index_pair->p1)}, {"exit_set", runs_json(s.index_pair->p2)}}
                                 : json(nullptr);
  j["conley"] = s.conley ? conley_json(*s.conley) : json(nullptr);
  return j;
}

MorseSet set_from(int depth, const json& j) {
  MorseSet s;
  s.id = j.at("id").get<std::uint32_t>();
  s.cells = runs_from(depth, j.at("cells"));
  s.isolation = isolation_from_string(j.at("isolation").get<std::string>());
  s.attractor_certificate = j.at("attractor_certificate").get<bool>();
  s.component_count = j.at("component_count").get<std::uint32_t>();
  s.component_map = j.at("component_map").get<std::vector<int>>();
  s.pictogram = pictogram_from(j.at("pictogram"));
  s.index_error = j.at("index_error").get<std::string>();
  if (!j.at("index_pair").is_null())
    s.index_pair = IndexPair{runs_from(depth, j["index_pair"].at("p1")), runs_from(depth, j["index_pair"].at("exit_set"))};
  if (!j.at("conley").is_null()) s.conley = conley_from(j["conley"]);
  return s;
}

}  // namespace

std::vector<std::array<std::uint32_t, 3>> row_runs(const CubicalSet& s) {
  std::vector<std::array<std::uint32_t, 3>> runs;
  for (const CellId c : s) {
    if (!runs.empty()) {
      auto& r = runs.back();
      if (r[0] == c.j && r[1] + r[2] == c.i) {
        ++r[2];
        continue;
      }
    }
    runs.push_back({c.j, c.i, 1});
  }
  return runs;
}

CubicalSet from_runs(int depth, const std::vector<std::array<std::uint32_t, 3>>& runs) {
  std::vector<CellId> cells;
  for (const auto& [j, i0, len] : runs)
    for (std::uint32_t k = 0; k < len; ++k) cells.push_back({i0 + k, j});
  return CubicalSet(depth, std::move(cells));
}

std::string emit_result(const ResultRecord& r) {
  json j;
  j["format"] = "akdyn-result";
  j["version"] = 1;
  j["box"] = r.box ? json::array({r.box->first, r.box->second}) : json(nullptr);
  j["params"] = params_json(r.params);
  j["error"] = r.error;
  if (r.decomposition) {
    const MorseDecomposition& d = *r.decomposition;
    json sets = json::array();
    for (const MorseSet& s : d.sets) sets.push_back(set_json(s));
    j["decomposition"] = {{"params", params_json(d.params)},
                          {"bounds", {{"x", interval_json(d.bounds.x)}, {"y", interval_json(d.bounds.y)}}},
                          {"initial_depth", d.initial_depth},
                          {"depth", d.depth},
                          {"absorbing", d.absorbing},
                          {"spurious", d.spurious},
                          {"sets", sets},
                          {"order", relation_json(d.order)},
                          {"order_reduced", relation_json(d.reduced_order())}};
  } else {
    j["decomposition"] = nullptr;
  }
  return j.dump() + "\n";
}

ResultRecord parse_result(std::string_view text) {
  try {
    const json j = json::parse(text.begin(), text.end());
    if (j.at("format") != "akdyn-result") throw ReportError("not a result file");
    if (j.at("version") != 1) throw ReportError("unsupported result version");
    ResultRecord r;
    if (!j.at("box").is_null()) r.box = std::make_pair(j["box"].at(0).get<std::uint32_t>(), j["box"].at(1).get<std::uint32_t>());
    r.params = params_from(j.at("params"));
    r.error = j.at("error").get<std::string>();
    const json& dj = j.at("decomposition");
    if (!dj.is_null()) {
      MorseDecomposition d;
      d.params = params_from(dj.at("params"));
      d.bounds = IRect{interval_from(dj.at("bounds").at("x")), interval_from(dj.at("bounds").at("y"))};
      d.initial_depth = dj.at("initial_depth").get<int>();
      d.depth = dj.at("depth").get<int>();
      d.absorbing = dj.at("absorbing").get<bool>();
      d.spurious = dj.at("spurious").get<decltype(d.spurious)>();
      for (const auto& s : dj.at("sets")) d.sets.push_back(set_from(d.depth, s));
      d.order = relation_from(dj.at("order"));
      for (std::size_t k = 0; k < d.sets.size(); ++k)
        if (d.sets[k].id != k) throw ReportError("Morse set ids must be 0, 1, ...");
      for (const auto& [p, q] : d.order)
        if (p >= d.sets.size() || q >= d.sets.size()) throw ReportError("order edge refers to a missing set");
      r.decomposition = std::move(d);
    }
    return r;
  } catch (const json::exception& e) {
    throw ReportError(std::string("malformed result file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ReportError(std::string("malformed result file: ") + e.what());
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const ReportError*>(&e)) throw;
    throw ReportError(std::string("malformed result file: ") + e.what());
  }
}

std::string result_file_name(std::uint32_t i, std::uint32_t j) {
  return "box_" + std::to_string(i) + "_" + std::to_string(j) + ".result";
}

int unstable_directions(IndexKind k) {
  switch (k) {
    case IndexKind::attractor: return 0;
    case IndexKind::saddle: return 1;
    case IndexKind::repeller: return 2;
    case IndexKind::trivial:
    case IndexKind::undetermined: return -1;
  }
  return -1;
}

std::string emit_cmgraph(const MorseDecomposition& d) {
  std::string out = "digraph cmgraph {\n  node [shape=box];\n";
  for (const MorseSet& s : d.sets) {
    const Pictogram& p = s.pictogram;
    std::string period;
    for (std::size_t k = 0; k < p.period.size(); ++k) period += (k ? "," : "") + std::to_string(p.period[k]);
    std::string label = std::to_string(s.id) + ": " + to_string(p.kind);
    label += "\\n" + std::string(p.components, 'o');
    if (unstable_directions(p.kind) > 0) label += " " + std::string(static_cast<std::size_t>(unstable_directions(p.kind)), '^');
    if (p.flip == Flip::yes) label += " -";
    out += "  n" + std::to_string(s.id) + " [label=\"" + label + "\", kind=\"" + to_string(p.kind) +
           "\", components=" + std::to_string(p.components) + ", unstable=" +
           std::to_string(unstable_directions(p.kind)) + ", flip=\"" + to_string(p.flip) + "\", period=\"" + period +
           "\", loops=" + std::to_string(p.loops) + ", cells=" + std::to_string(s.cells.size()) + ", isolation=\"" +
           to_string(s.isolation) + "\"];\n";
  }
  for (const auto& [p, q] : d.reduced_order())
    out += "  n" + std::to_string(p) + " -> n" + std::to_string(q) + ";\n";
  out += "}\n";
  return out;
}

std::string palette(std::uint32_t k) {
  const double h = std::fmod(0.05 + 0.6180339887498949 * k, 1.0) * 6.0;
  const double s = 0.85, v = k % 2 ? 0.75 : 0.9;
  const int sector = static_cast<int>(h);
  const double f = h - sector, p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  double rgb[3];
  switch (sector % 6) {
    case 0: rgb[0] = v, rgb[1] = t, rgb[2] = p; break;
    case 1: rgb[0] = q, rgb[1] = v, rgb[2] = p; break;
    case 2: rgb[0] = p, rgb[1] = v, rgb[2] = t; break;
    case 3: rgb[0] = p, rgb[1] = q, rgb[2] = v; break;
    case 4: rgb[0] = t, rgb[1] = p, rgb[2] = v; break;
    default: rgb[0] = v, rgb[1] = p, rgb[2] = q; break;
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(rgb[0] * 255)),
                static_cast<int>(std::lround(rgb[1] * 255)), static_cast<int>(std::lround(rgb[2] * 255)));
  return buf;
}

namespace {

std::array<int, 3> parse_color(const std::string& c) {
  if (c.size() != 7 || c[0] != '#') throw std::invalid_argument("color must be #rrggbb");
  return {std::stoi(c.substr(1, 2), nullptr, 16), std::stoi(c.substr(3, 2), nullptr, 16),
          std::stoi(c.substr(5, 2), nullptr, 16)};
}

struct Frame {
  double x0, x1, y0, y1;
};

Frame crop(const Grid& g, const MorseDecomposition& d, double margin) {
  bool any = false;
  Frame f{0, 0, 0, 0};
  auto grow = [&](const CubicalSet& s) {
    for (const CellId c : s) {
      const IRect r = g.cell_rect(c);
      if (!any) f = {r.x.lo(), r.x.hi(), r.y.lo(), r.y.hi()};
      f = {std::min(f.x0, r.x.lo()), std::max(f.x1, r.x.hi()), std::min(f.y0, r.y.lo()), std::max(f.y1, r.y.hi())};
      any = true;
    }
  };
  for (const MorseSet& s : d.sets) {
    grow(s.cells);
    if (s.index_pair) grow(s.index_pair->p2);
  }
  if (!any) f = {d.bounds.x.lo(), d.bounds.x.hi(), d.bounds.y.lo(), d.bounds.y.hi()};
  const double m = margin * std::max(f.x1 - f.x0, f.y1 - f.y0);
  return {f.x0 - m, f.x1 + m, f.y0 - m, f.y1 + m};
}

// Axis-parallel rectangles in state coordinates, one per row run.
template <class Fn>
void for_each_run_rect(const Grid& g, const CubicalSet& s, Fn fn) {
  for (const auto& [j, i0, len] : row_runs(s)) {
    const IRect a = g.cell_rect({i0, j}), b = g.cell_rect({i0 + len - 1, j});
    fn(a.x.lo(), b.x.hi(), a.y.lo(), a.y.hi());
  }
}

}  // namespace

std::string lighten(const std::string& color, double amount) {
  const auto c = parse_color(color);
  char buf[8];
  auto mix = [&](int v) { return static_cast<int>(std::lround(v + (255 - v) * amount)); };
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", mix(c[0]), mix(c[1]), mix(c[2]));
  return buf;
}

std::string emit_phase_portrait(const MorseDecomposition& d, const PortraitOptions& o) {
  const Grid g(d.bounds, d.depth);
  const Frame f = crop(g, d, o.margin);
  const double scale = o.width / (f.x1 - f.x0);
  const double left = 60, bottom = 40, top = 10, right = 10;
  const double h = (f.y1 - f.y0) * scale;
  auto X = [&](double x) { return fmt("%.3f", left + (x - f.x0) * scale); };
  auto Y = [&](double y) { return fmt("%.3f", top + (f.y1 - y) * scale); };
  auto W = [&](double w) { return fmt("%.3f", w * scale); };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", left + o.width + right) +
                    "\" height=\"" + fmt("%.0f", top + h + bottom) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  auto draw = [&](const CubicalSet& s, const std::string& cls, std::uint32_t id, const std::string& color) {
    out += "<g class=\"" + cls + "\" id=\"" + cls + std::to_string(id) + "\" fill=\"" + color + "\">\n";
    for_each_run_rect(g, s, [&](double x0, double x1, double y0, double y1) {
      out += "<rect x=\"" + X(x0) + "\" y=\"" + Y(y1) + "\" width=\"" + W(x1 - x0) + "\" height=\"" + W(y1 - y0) + "\"/>\n";
    });
    out += "</g>\n";
  };
  for (const MorseSet& s : d.sets)
    if (s.index_pair && !s.index_pair->p2.empty()) draw(s.index_pair->p2, "exit", s.id, lighten(palette(s.id)));
  for (const MorseSet& s : d.sets) draw(s.cells, "set", s.id, palette(s.id));

  if (!o.overlay.empty()) {
    std::set<std::pair<long, long>> seen;
    out += "<g class=\"overlay\" fill=\"#000000\">\n";
    for (const State& p : o.overlay) {
      if (p.x < f.x0 || p.x > f.x1 || p.y < f.y0 || p.y > f.y1) continue;
      const long px = std::lround((p.x - f.x0) * scale * 2), py = std::lround((f.y1 - p.y) * scale * 2);
      if (!seen.insert({px, py}).second) continue;
      out += "<circle cx=\"" + X(p.x) + "\" cy=\"" + Y(p.y) + "\" r=\"1\"/>\n";
    }
    out += "</g>\n";
  }

  out += "<g class=\"axes\" stroke=\"#000000\" fill=\"none\">\n<rect x=\"" + X(f.x0) + "\" y=\"" + Y(f.y1) +
         "\" width=\"" + W(f.x1 - f.x0) + "\" height=\"" + W(f.y1 - f.y0) + "\"/>\n</g>\n";
  out += "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#000000\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = f.x0 + (f.x1 - f.x0) * k / 4, y = f.y0 + (f.y1 - f.y0) * k / 4;
    out += "<text x=\"" + X(x) + "\" y=\"" + fmt("%.3f", top + h + 15) + "\" text-anchor=\"middle\">" +
           fmt("%.3g", x) + "</text>\n";
    out += "<text x=\"" + fmt("%.3f", left - 5) + "\" y=\"" + Y(y) + "\" text-anchor=\"end\">" + fmt("%.3g", y) +
           "</text>\n";
  }
  out += "<text x=\"" + fmt("%.3f", left + o.width / 2) + "\" y=\"" + fmt("%.3f", top + h + 33) +
         "\" text-anchor=\"middle\">x</text>\n";
  out += "<text x=\"12\" y=\"" + fmt("%.3f", top + h / 2) + "\">y</text>\n</g>\n</svg>\n";
  return out;
}

std::string emit_phase_portrait_ppm(const MorseDecomposition& d, std::uint32_t pixels,
                                    const std::vector<State>& overlay) {
  if (pixels == 0) throw std::invalid_argument("raster needs at least one pixel");
  const Grid g(d.bounds, d.depth);
  const Frame f = crop(g, d, 0.05);
  const double scale = pixels / (f.x1 - f.x0);
  const auto w = pixels;
  const auto h = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::lround((f.y1 - f.y0) * scale)));
  std::vector<std::array<int, 3>> img(std::size_t{w} * h, {255, 255, 255});
  auto fill = [&](const CubicalSet& s, const std::array<int, 3>& c) {
    for_each_run_rect(g, s, [&](double x0, double x1, double y0, double y1) {
      const auto c0 = static_cast<long>(std::floor((x0 - f.x0) * scale));
      const auto c1 = static_cast<long>(std::ceil((x1 - f.x0) * scale));
      const auto r0 = static_cast<long>(std::floor((f.y1 - y1) * scale));
      const auto r1 = static_cast<long>(std::ceil((f.y1 - y0) * scale));
      for (long r = std::max(0L, r0); r < std::min<long>(h, std::max(r1, r0 + 1)); ++r)
        for (long col = std::max(0L, c0); col < std::min<long>(w, std::max(c1, c0 + 1)); ++col)
          img[static_cast<std::size_t>(r) * w + static_cast<std::size_t>(col)] = c;
    });
  };
  for (const MorseSet& s : d.sets)
    if (s.index_pair && !s.index_pair->p2.empty()) fill(s.index_pair->p2, parse_color(lighten(palette(s.id))));
  for (const MorseSet& s : d.sets) fill(s.cells, parse_color(palette(s.id)));
  for (const State& p : overlay) {
    const auto col = static_cast<long>(std::floor((p.x - f.x0) * scale));
    const auto row = static_cast<long>(std::floor((f.y1 - p.y) * scale));
    if (col >= 0 && col < static_cast<long>(w) && row >= 0 && row < static_cast<long>(h))
      img[static_cast<std::size_t>(row) * w + static_cast<std::size_t>(col)] = {0, 0, 0};
  }
  std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  for (const auto& c : img)
    for (const int v : c) out.push_back(static_cast<char>(v));
  return out;
}

std::string emit_continuation_diagram(const ContinuationDiagram& cd, const ParamGrid& pg) {
  if (cd.n1 != pg.n1 || cd.n2 != pg.n2) throw std::invalid_argument("diagram and parameter grid differ in size");
  const double cell = std::max(2.0, 640.0 / std::max(pg.n1, pg.n2));
  const double left = 60, top = 10, bottom = 40;
  const double gw = cell * pg.n1, gh = cell * pg.n2;
  std::map<std::uint32_t, std::size_t> sizes;
  for (const auto l : cd.label) ++sizes[l];
  const double legend_h = 16.0 * static_cast<double>(sizes.size()) + 10;
  const double height = std::max(top + gh + bottom, legend_h + top);

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", left + gw + 260) +
                    "\" height=\"" + fmt("%.0f", height) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  out += "<g class=\"boxes\">\n";
  for (std::uint32_t j = 0; j < pg.n2; ++j)
    for (std::uint32_t i = 0; i < pg.n1; ++i) {
      const std::size_t k = pg.index(i, j);
      out += "<rect x=\"" + fmt("%.3f", left + i * cell) + "\" y=\"" + fmt("%.3f", top + (pg.n2 - 1 - j) * cell) +
             "\" width=\"" + fmt("%.3f", cell) + "\" height=\"" + fmt("%.3f", cell) + "\" fill=\"" +
             palette(cd.color[k]) + "\" data-box=\"" + std::to_string(k) + "\" data-class=\"" +
             std::to_string(cd.label[k]) + "\"/>\n";
    }
  out += "</g>\n<g class=\"axes\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<rect x=\"" + fmt("%.3f", left) + "\" y=\"" + fmt("%.3f", top) + "\" width=\"" + fmt("%.3f", gw) +
         "\" height=\"" + fmt("%.3f", gh) + "\" fill=\"none\" stroke=\"#000000\"/>\n";
  out += "<text x=\"" + fmt("%.3f", left) + "\" y=\"" + fmt("%.3f", top + gh + 15) + "\">" +
         fmt("%.6g", pg.alpha1.lo()) + "</text>\n";
  out += "<text x=\"" + fmt("%.3f", left + gw) + "\" y=\"" + fmt("%.3f", top + gh + 15) +
         "\" text-anchor=\"end\">" + fmt("%.6g", pg.alpha1.hi()) + "</text>\n";
  out += "<text x=\"" + fmt("%.3f", left + gw / 2) + "\" y=\"" + fmt("%.3f", top + gh + 33) +
         "\" text-anchor=\"middle\">alpha1</text>\n";
  out += "<text x=\"" + fmt("%.3f", left - 5) + "\" y=\"" + fmt("%.3f", top + gh) + "\" text-anchor=\"end\">" +
         fmt("%.6g", pg.alpha2.lo()) + "</text>\n";
  out += "<text x=\"" + fmt("%.3f", left - 5) + "\" y=\"" + fmt("%.3f", top + 10) + "\" text-anchor=\"end\">" +
         fmt("%.6g", pg.alpha2.hi()) + "</text>\n";
  out += "<text x=\"5\" y=\"" + fmt("%.3f", top + gh / 2) + "\">alpha2</text>\n</g>\n";
  out += "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
  double y = top;
  for (const auto& [label, count] : sizes) {
    out += "<rect x=\"" + fmt("%.3f", left + gw + 20) + "\" y=\"" + fmt("%.3f", y) + "\" width=\"12\" height=\"12\" fill=\"" +
           palette(cd.color[label]) + "\"/>\n";
    out += "<text x=\"" + fmt("%.3f", left + gw + 38) + "\" y=\"" + fmt("%.3f", y + 10) + "\">class " +
           std::to_string(label) + ": " + std::to_string(count) + (count == 1 ? " box" : " boxes") + "</text>\n";
    y += 16;
  }
  out += "</g>\n</svg>\n";
  return out;
}

std::string emit_class_summary(const ContinuationDiagram& cd, const std::vector<std::optional<MorseDecomposition>>& d) {
  std::map<std::uint32_t, std::size_t> sizes;
  for (const auto l : cd.label) ++sizes[l];
  std::string out = "# class boxes color cm_graph\n";
  for (const auto& [label, count] : sizes) {
    const std::string summary = label < d.size() && d[label] ? cm_summary(*d[label]) : "none";
    out += std::to_string(label) + " " + std::to_string(count) + " " + palette(cd.color[label]) + " " + summary + "\n";
  }
  return out;
}

std::string emit_scatter(const std::vector<std::pair<double, double>>& pts, const std::string& xlabel,
                         const std::string& ylabel) {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!pts.empty()) {
    x0 = x1 = pts.front().first;
    y0 = y1 = pts.front().second;
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
  }
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double left = 70, top = 10, w = 800, h = 500;
  auto X = [&](double x) { return fmt("%.2f", left + (x - x0) / (x1 - x0) * w); };
  auto Y = [&](double y) { return fmt("%.2f", top + (y1 - y) / (y1 - y0) * h); };
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", left + w + 10) +
                    "\" height=\"" + fmt("%.0f", top + h + 45) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  out += "<g class=\"points\" fill=\"#000000\">\n";
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& [x, y] : pts) {
    auto key = std::make_pair(X(x), Y(y));
    if (!seen.insert(key).second) continue;
    out += "<rect x=\"" + key.first + "\" y=\"" + key.second + "\" width=\"1\" height=\"1\"/>\n";
  }
  out += "</g>\n<g class=\"axes\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<rect x=\"" + fmt("%.2f", left) + "\" y=\"" + fmt("%.2f", top) + "\" width=\"" + fmt("%.2f", w) +
         "\" height=\"" + fmt("%.2f", h) + "\" fill=\"none\" stroke=\"#000000\"/>\n";
  out += "<text x=\"" + X(x0) + "\" y=\"" + fmt("%.2f", top + h + 15) + "\">" + fmt("%.6g", x0) + "</text>\n";
  out += "<text x=\"" + X(x1) + "\" y=\"" + fmt("%.2f", top + h + 15) + "\" text-anchor=\"end\">" + fmt("%.6g", x1) + "</text>\n";
  out += "<text x=\"" + fmt("%.2f", left - 5) + "\" y=\"" + Y(y0) + "\" text-anchor=\"end\">" + fmt("%.6g", y0) + "</text>\n";
  out += "<text x=\"" + fmt("%.2f", left - 5) + "\" y=\"" + fmt("%.2f", top + 10) + "\" text-anchor=\"end\">" + fmt("%.6g", y1) + "</text>\n";
  out += "<text x=\"" + fmt("%.2f", left + w / 2) + "\" y=\"" + fmt("%.2f", top + h + 35) + "\" text-anchor=\"middle\">" + xlabel + "</text>\n";
  out += "<text x=\"5\" y=\"" + fmt("%.2f", top + h / 2) + "\">" + ylabel + "</text>\n</g>\n</svg>\n";
  return out;
}

std::string emit_bifurcation_table(const std::vector<BifurcationPoint>& pts) {
  std::string out;
  for (const auto& p : pts) out += fmt("%.17g", p.alpha) + " " + fmt("%.17g", p.value) + "\n";
  return out;
}

std::string emit_points(const std::vector<State>& pts) {
  std::string out;
  for (const auto& p : pts) out += fmt("%.17g", p.x) + " " + fmt("%.17g", p.y) + "\n";
  return out;
}

}  // namespace akdyn
