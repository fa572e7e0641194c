#include "circdiff/map_io.hpp"

namespace circdiff {

Real real_from_json(const json& j) {
  ensure_precision_initialized();
  if (j.is_string()) return real_from_string(j.get<std::string>());
  if (j.is_number_integer()) return Real(j.get<long long>());
  if (j.is_number()) return Real(j.get<double>());
  throw Error(Errc::InvalidInput, "expected a number or decimal string");
}

json real_to_json(const Real& v) { return to_decimal_string(v); }

namespace {

std::vector<Real> reals_from_json(const json& j) {
  std::vector<Real> out;
  for (const auto& e : j) out.push_back(real_from_json(e));
  return out;
}

json reals_to_json(const std::vector<Real>& v) {
  json out = json::array();
  for (const auto& e : v) out.push_back(real_to_json(e));
  return out;
}

CircleDiffeo closed_form_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  const json& p = j.contains("params") ? j.at("params") : json::object();
  if (family == "sine") {
    Real c = p.contains("c") ? real_from_json(p.at("c")) : Real(0);
    Real a = p.contains("a") ? real_from_json(p.at("a")) : Real(0);
    Real phase = p.contains("phase") ? real_from_json(p.at("phase")) : Real(0);
    return sine_map(c, a, phase);
  }
  throw Error(Errc::InvalidInput, "unknown closed-form family: " + family);
}

}  // namespace

CircleDiffeo map_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "rotation") return rotation_map(real_from_json(j.at("angle")));
  if (type == "identity") return identity_map();
  if (type == "closed_form") return closed_form_from_json(j);
  if (type == "pw_affine")
    return pw_affine_map(reals_from_json(j.at("breakpoints")),
                         reals_from_json(j.at("images")));
  if (type == "blended") {
    // piecewise-affine map plus quadratic blend ramps at chosen breakpoints
    std::vector<Real> bps = reals_from_json(j.at("breakpoints"));
    std::vector<Real> ims = reals_from_json(j.at("images"));
    PwAffineHomeo base(bps, ims);
    const auto& sorted_bps = base.breakpoints();
    const auto& sorted_ims = base.images();
    std::vector<Real> slopes = base.slopes();
    const size_t m = sorted_bps.size();
    std::vector<Real> radius(m, Real(0));
    for (const auto& b : j.at("blends")) {
      size_t idx = b.at("breakpoint_index").get<size_t>();
      if (idx >= m) throw Error(Errc::InvalidInput, "blend index out of range");
      radius[idx] = real_from_json(b.at("radius"));
    }
    std::vector<Real> F(m);
    F[0] = sorted_ims[0];
    for (size_t q = 1; q < m; ++q)
      F[q] = F[q - 1] + arc_length_ccw(sorted_ims[q - 1], sorted_ims[q]);
    std::vector<PwQuadNode::Node> nodes;
    for (size_t q = 0; q < m; ++q) {
      Real alpha = slopes[(q + m - 1) % m];
      Real beta = slopes[q];
      if (radius[q] > 0 && alpha != beta) {
        Real gap_l = arc_length_ccw(sorted_bps[(q + m - 1) % m], sorted_bps[q]);
        Real gap_r = arc_length_ccw(sorted_bps[q], sorted_bps[(q + 1) % m]);
        if (!(radius[q] < gap_l / 2) || !(radius[q] < gap_r / 2))
          throw Error(Errc::InvalidInput, "blend radius exceeds its affine piece");
        Real xl = sorted_bps[q] - radius[q], Fl = F[q] - alpha * radius[q];
        Real xr = sorted_bps[q] + radius[q], Fr = F[q] + beta * radius[q];
        if (xl < 0) { xl += 1; Fl += 1; }
        if (xr >= 1) { xr -= 1; Fr -= 1; }
        nodes.push_back({xl, Fl, alpha, alpha});
        nodes.push_back({xr, Fr, beta, beta});
      } else {
        nodes.push_back({sorted_bps[q], F[q], alpha, beta});
      }
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const PwQuadNode::Node& a, const PwQuadNode::Node& b) {
                return a.x < b.x;
              });
    return CircleDiffeo(std::make_shared<PwQuadNode>(std::move(nodes)));
  }
  if (type == "pw_quad") {
    std::vector<PwQuadNode::Node> nodes;
    for (const auto& nd : j.at("nodes"))
      nodes.push_back({real_from_json(nd.at("x")), real_from_json(nd.at("F")),
                       real_from_json(nd.at("dl")), real_from_json(nd.at("dr"))});
    return CircleDiffeo(std::make_shared<PwQuadNode>(std::move(nodes)));
  }
  if (type == "composed") {
    std::vector<ComposedNode::Factor> factors;
    for (const auto& fj : j.at("factors")) {
      bool inv = fj.contains("inverse") && fj.at("inverse").get<bool>();
      factors.push_back({map_from_json(fj.at("map")), inv});
    }
    return compose(std::move(factors));
  }
  if (type == "denjoy") {
    DenjoySpec spec;
    spec.alpha = AlphaRep::from_value(real_from_json(j.at("alpha")));
    if (j.contains("length_law"))
      spec.length_family = j.at("length_law").at("family").get<std::string>();
    spec.total = real_from_json(j.at("total"));
    spec.n_trunc = j.contains("n_trunc") ? j.at("n_trunc").get<long>() : 200;
    return build_denjoy(spec).map;
  }
  throw Error(Errc::InvalidInput, "unknown map type: " + type);
}

json map_to_json(const CircleDiffeo& m) {
  const MapNode& n = m.node();
  if (auto rot = dynamic_cast<const RotationNode*>(&n))
    return json{{"type", "rotation"}, {"angle", real_to_json(rot->angle())}};
  if (auto sn = dynamic_cast<const SineNode*>(&n))
    return json{{"type", "closed_form"},
                {"family", "sine"},
                {"params",
                 {{"c", real_to_json(sn->offset())},
                  {"a", real_to_json(sn->amplitude())},
                  {"phase", real_to_json(sn->phase())}}}};
  if (auto pq = dynamic_cast<const PwQuadNode*>(&n)) {
    json nodes = json::array();
    for (const auto& nd : pq->pts())
      nodes.push_back({{"x", real_to_json(nd.x)},
                       {"F", real_to_json(nd.F)},
                       {"dl", real_to_json(nd.dl)},
                       {"dr", real_to_json(nd.dr)}});
    return json{{"type", "pw_quad"}, {"nodes", nodes}};
  }
  if (auto cp = dynamic_cast<const ComposedNode*>(&n)) {
    json factors = json::array();
    for (const auto& f : cp->factors())
      factors.push_back({{"map", map_to_json(f.map)}, {"inverse", f.inverse}});
    return json{{"type", "composed"}, {"factors", factors}};
  }
  throw Error(Errc::InvalidInput,
              std::string("map node '") + n.kind() + "' has no JSON form");
}

json schedule_to_json(const CharacteristicSchedule& s) {
  json entries = json::array();
  for (const auto& e : s.entries)
    entries.push_back({{"k", e.k},
                       {"N", e.N},
                       {"r", e.r},
                       {"s", e.s},
                       {"a", real_to_json(e.a)},
                       {"b", real_to_json(e.b)},
                       {"w", e.w},
                       {"adapted", e.adapted}});
  return json{{"alpha", real_to_json(s.alpha.value)}, {"entries", entries}};
}

json analysis_to_json(long n, const AnalyzeResult& res) {
  json out{{"n", n},
           {"i", analysis_index_i(res)},
           {"j", analysis_index_j(res)},
           {"R0", real_to_json(analysis_R0(res))},
           {"Rn", real_to_json(analysis_Rn(res))},
           {"adapted", is_adapted(res)}};
  if (!is_adapted(res))
    out["reason"] = not_adapted_reason_name(std::get<NotAdapted>(res).reason);
  return out;
}

json cert_to_json(const CertReport& c) {
  return json{{"bound_type", c.bound_type},
              {"epsilon", real_to_json(c.epsilon)},
              {"worst_ratio", real_to_json(c.worst_ratio)},
              {"worst_point", real_to_json(c.worst_point)},
              {"additive_bound", real_to_json(c.additive_bound)},
              {"max_dg", real_to_json(c.max_dg)},
              {"samples", c.samples},
              {"pass", c.pass}};
}

json smoothing_to_json(const SmoothingReport& s) {
  return json{{"bound_type", "p_smoothing"},
              {"epsilon", real_to_json(s.epsilon)},
              {"worst_gap", real_to_json(s.worst_gap)},
              {"worst_point", real_to_json(s.worst_point)},
              {"samples", s.samples},
              {"pass", s.pass}};
}

json plan_to_json(const PerturbationPlan& p) {
  return json{{"k", p.k},
              {"w", p.w},
              {"t_initial", real_to_json(p.t_initial)},
              {"t_final", real_to_json(p.t_final)},
              {"feasible", p.feasible},
              {"eps", real_to_json(p.eps)},
              {"target_R0", real_to_json(p.target_R0)},
              {"target_Rn", real_to_json(p.target_Rn)},
              {"achieved_R0", real_to_json(p.achieved_R0)},
              {"achieved_Rn", real_to_json(p.achieved_Rn)},
              {"c1_sup", real_to_json(p.c1_sup)},
              {"c1_deriv", real_to_json(p.c1_deriv)},
              {"order_preserved", p.order_preserved}};
}

json pipeline_report_to_json(const PipelineReport& r) {
  json attempts = json::array();
  for (const auto& a : r.attempts)
    attempts.push_back({{"k", a.k},
                        {"w", a.w},
                        {"adapted", a.adapted},
                        {"component_distortion", real_to_json(a.component_distortion)},
                        {"distortion_budget_met", a.distortion_budget_met},
                        {"perturb_feasible", a.perturb_feasible},
                        {"l_affine_pass", a.l_affine_pass},
                        {"smoothing_pass", a.smoothing_pass},
                        {"final_sup", real_to_json(a.final_sup)},
                        {"final_deriv", real_to_json(a.final_deriv)},
                        {"success", a.success},
                        {"note", a.note}});
  json out{{"pass", r.pass},
           {"k", r.k},
           {"w", r.w},
           {"eps", real_to_json(r.eps)},
           {"max_dg", real_to_json(r.max_dg)},
           {"denjoy_applied", r.denjoy_applied},
           {"target_R0", real_to_json(r.target_R0)},
           {"target_Rn", real_to_json(r.target_Rn)},
           {"perturbation", plan_to_json(r.perturbation)},
           {"l_affine", cert_to_json(r.l_affine)},
           {"smoothing", smoothing_to_json(r.smoothing)},
           {"final_sup", real_to_json(r.final_sup)},
           {"final_deriv", real_to_json(r.final_deriv)},
           {"seed", r.seed},
           {"attempts", attempts}};
  if (!r.pass) out["failure_stage"] = r.failure_stage;
  if (r.denjoy_applied) out["denjoy_eps"] = real_to_json(r.denjoy_eps);
  return out;
}

json reduction_to_json(const ReductionResult& r) {
  json certs = json::array();
  for (const auto& c : r.certificates)
    certs.push_back({{"left", real_to_json(c.arc.left)},
                     {"right", real_to_json(c.arc.right)},
                     {"distortion", real_to_json(c.distortion_value)},
                     {"tracked", c.tracked}});
  return json{{"eps", real_to_json(r.eps)},
              {"pass", r.pass},
              {"certificates", certs}};
}

json denjoy_build_to_json(const DenjoyBuild& b) {
  json intervals = json::array();
  for (const auto& [n, arc] : b.intervals)
    intervals.push_back({{"n", n},
                         {"left", real_to_json(arc.left)},
                         {"length", real_to_json(arc.length())}});
  return json{{"inserted_mass", real_to_json(b.inserted_mass)},
              {"intervals", intervals}};
}

}  // namespace circdiff
