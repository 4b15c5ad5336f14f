#include "fsg/report_json.hpp"

namespace fsg {

Json bound_json(double value, const char* side) {
  return Json{{"value", value}, {"side", side}};
}

Json fourier_to_json(const PathBasis& basis, const FourierSeries& series) {
  Json arr = Json::array();
  for (const auto& [i, a] : series.coeffs) {
    if (a == cplx(0.0)) continue;
    arr.push_back(Json::array(
        {path_to_string(basis.graph(), basis.path(i)), a.real(), a.imag()}));
  }
  return arr;
}

Json classification_to_json(const DirectedMultigraph& g, const ClassificationReport& rep) {
  Json comps = Json::array();
  for (const auto& c : rep.components) {
    Json jc;
    Json verts = Json::array();
    for (int v : c.vertices) verts.push_back(g.vertex_id(v));
    jc["vertices"] = verts;
    if (c.unknown_reason) {
      jc["verdict"] = "Unknown";
      jc["reason"] = *c.unknown_reason;
    } else {
      jc["verdict"] = verdict_name(c.verdict);
      if (c.verdict == Verdict::CircleGraph) jc["circle_n"] = c.circle_n;
    }
    if (c.decomposition) {
      const auto& d = *c.decomposition;
      Json jd;
      Json tv = Json::array();
      for (int v : d.trunk_vertices) tv.push_back(g.vertex_id(v));
      jd["trunk_vertices"] = tv;
      Json te = Json::array();
      for (int e : d.trunk_edges) te.push_back(g.edge(e).id);
      jd["trunk_edges"] = te;
      Json fruits = Json::array();
      for (const auto& f : d.fruits) {
        Json jf;
        jf["attach_vertex"] = g.vertex_id(f.attach_vertex);
        jf["orientation"] = f.out_fruit ? "out" : "in";
        jf["trunk_edge"] = g.edge(f.trunk_edge).id;
        jf["circle_n"] = f.circle_vertices.size();
        Json cv = Json::array();
        for (int v : f.circle_vertices) cv.push_back(g.vertex_id(v));
        jf["circle_vertices"] = cv;
        fruits.push_back(std::move(jf));
      }
      jd["fruits"] = fruits;
      jc["fruit_decomposition"] = jd;
    }
    if (c.violation) {
      Json jv;
      jv["property"] = c.violation->property;
      jv["witness"] = c.violation->witness;
      Json we = Json::array();
      for (int e : c.violation->witness_edges) we.push_back(g.edge(e).id);
      jv["witness_edges"] = we;
      Json wv = Json::array();
      for (int v : c.violation->witness_vertices) wv.push_back(g.vertex_id(v));
      jv["witness_vertices"] = wv;
      jc["violation"] = jv;
    }
    if (c.alternating)
      jc["alternating_number"] = *c.alternating;
    else
      jc["alternating_number"] = "budget_exceeded";
    Json ae = Json::array();
    for (int e : c.probes.acyclic_edges) ae.push_back(g.edge(e).id);
    jc["acyclic_edges"] = ae;
    jc["polygon_count"] = c.probes.polygon_count;
    jc["polygon_budget_hit"] = c.probes.polygon_budget_hit;
    if (c.probes.fake_circle) {
      Json fc = Json::array();
      for (int e : c.probes.fake_circle->edges) fc.push_back(g.edge(e).id);
      jc["fake_circle"] = fc;
    }
    comps.push_back(std::move(jc));
  }
  return Json{{"components", comps}};
}

Json graded_to_json(const GradedH1Report& rep) {
  Json degs = Json::array();
  for (int d = 0; d <= rep.max_degree; ++d) {
    const auto& e = rep.degrees[d];
    degs.push_back(Json{{"degree", d},
                        {"dim_der", e.dim_der},
                        {"dim_inn", e.dim_inn},
                        {"dim_h1", e.dim_h1},
                        {"truncated", e.truncated}});
  }
  Json out{{"max_degree", rep.max_degree}, {"degrees", degs}, {"truncated", rep.truncated}};
  if (!rep.witnesses.empty()) {
    Json ws = Json::array();
    for (const auto& w : rep.witnesses) {
      Json jw = spec_to_json(w.spec);
      jw["degree"] = w.degree;
      ws.push_back(std::move(jw));
    }
    out["witnesses"] = ws;
  }
  return out;
}

Json h1_to_json(const DirectedMultigraph& g, const H1Result& result) {
  auto name = [](H1Verdict v) {
    switch (v) {
      case H1Verdict::Trivial: return "Trivial";
      case H1Verdict::Nontrivial: return "Nontrivial";
      case H1Verdict::Unknown: return "Unknown";
    }
    return "?";
  };
  Json comps = Json::array();
  for (const auto& c : result.components) {
    Json jc;
    Json verts = Json::array();
    for (int v : c.vertices) verts.push_back(g.vertex_id(v));
    jc["vertices"] = verts;
    jc["verdict"] = name(c.verdict);
    jc["reason"] = c.reason;
    if (c.witness) jc["witness"] = spec_to_json(*c.witness);
    comps.push_back(std::move(jc));
  }
  return Json{{"verdict", name(result.combined)}, {"components", comps}};
}

Json spec_to_json(const DerivationSpec& spec) {
  const PathBasis& b = *spec.basis;
  const DirectedMultigraph& g = b.graph();
  Json out;
  out["graph"] = Json::parse(to_json_string(g));
  out["depth"] = b.depth();
  Json vv;
  for (const auto& [v, val] : spec.vertex_values)
    vv[g.vertex_id(v)] = fourier_to_json(b, val.fourier());
  out["vertex_values"] = vv;
  Json ev;
  for (const auto& [e, val] : spec.edge_values)
    ev[g.edge(e).id] = fourier_to_json(b, val.fourier());
  out["edge_values"] = ev;
  if (spec.grade) out["grade"] = *spec.grade;
  return out;
}

}  // namespace fsg
