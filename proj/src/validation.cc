#include "edge_forge/validation.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "edge_forge/errors.h"

namespace edge_forge {

std::string_view to_string(TimestepClass c) {
  return c == TimestepClass::FailureTs ? "FailureTs" : "SuccessTs";
}

std::string_view to_string(Outcome o) {
  return o == Outcome::FailureScenario ? "FailureScenario" : "SuccessScenario";
}

std::string_view to_string(FractionBasis b) {
  return b == FractionBasis::RoiOnly ? "roi_only" : "all_timesteps";
}

FractionBasis fraction_basis_from_string(std::string_view name) {
  if (name == "all_timesteps") return FractionBasis::AllTimesteps;
  if (name == "roi_only") return FractionBasis::RoiOnly;
  throw ConfigError("validation.fraction_basis must be all_timesteps or "
                    "roi_only, got " + std::string(name));
}

void validate(const ValidationConfig& c) {
  if (!(c.success_threshold >= 0.0 && c.success_threshold <= 1.0)) {
    throw ConfigError("validation.success_threshold must be in [0, 1]");
  }
  if (c.reward_window < 1) {
    throw ConfigError("validation.reward_window must be >= 1");
  }
  if (c.top_k < 1) throw ConfigError("validation.top_k must be >= 1");
}

TimestepClass classify_timestep(double d_eucl, double d_rss, bool in_roi,
                                bool collided) {
  if (in_roi && !collided && is_dangerous(d_eucl, d_rss)) {
    return TimestepClass::FailureTs;
  }
  return TimestepClass::SuccessTs;
}

TimestepRecord make_timestep_record(const SimState& s, int action,
                                    const WorldConfig& world,
                                    const RssParams& rss) {
  TimestepRecord r;
  r.step = s.step_count;
  r.t = s.t;
  r.action = action;
  r.ego_x = s.ego_x;
  r.ego_y = s.ego_y;
  r.ego_speed = s.ego_speed;
  r.ped_x = s.ped_x;
  r.ped_y = s.ped_y;
  r.ped_speed = s.ped_speed;
  r.d_eucl = observe(s).euclid_dist;
  r.d_rss = safe_longitudinal_distance(s.ego_speed, 0.0, rss);
  r.in_roi = in_detection_region(s, world);
  r.collided = s.term_reason == TermReason::Collision;
  r.reward = compute_reward(s, world, rss).value;
  r.classification =
      classify_timestep(r.d_eucl, r.d_rss, r.in_roi, r.collided);
  return r;
}

double success_fraction(std::span<const TimestepRecord> timesteps,
                        FractionBasis basis) {
  std::size_t counted = 0;
  std::size_t successes = 0;
  for (const auto& ts : timesteps) {
    if (basis == FractionBasis::RoiOnly && !ts.in_roi) continue;
    ++counted;
    if (ts.classification == TimestepClass::SuccessTs) ++successes;
  }
  if (counted == 0) return 1.0;
  return static_cast<double>(successes) / static_cast<double>(counted);
}

Outcome classify_episode(const EpisodeRecord& episode, double threshold,
                         FractionBasis basis) {
  if (episode.timesteps.empty()) {
    throw UsageError("cannot classify an episode without timesteps");
  }
  return success_fraction(episode.timesteps, basis) > threshold
             ? Outcome::SuccessScenario
             : Outcome::FailureScenario;
}

void finalize_episode(EpisodeRecord& episode,
                      const ValidationConfig& config) {
  episode.total_reward = 0;
  for (const auto& ts : episode.timesteps) episode.total_reward += ts.reward;
  episode.success_fraction =
      success_fraction(episode.timesteps, config.fraction_basis);
  episode.outcome = classify_episode(episode, config.success_threshold,
                                     config.fraction_basis);
}

double success_probability(std::int64_t successes, std::int64_t total) {
  if (total <= 0) throw UsageError("success probability of zero episodes");
  if (successes < 0 || successes > total) {
    throw UsageError("success count outside [0, total]");
  }
  return static_cast<double>(successes) / static_cast<double>(total);
}

double success_probability(std::span<const EpisodeRecord> records) {
  const auto successes = std::ranges::count_if(records, [](const auto& r) {
    return r.outcome == Outcome::SuccessScenario;
  });
  return success_probability(successes,
                             static_cast<std::int64_t>(records.size()));
}

std::string format_probability(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", p);
  return buf;
}

std::vector<double> moving_average(std::span<const double> values,
                                   int window) {
  if (window < 1) throw UsageError("moving average window must be >= 1");
  std::vector<double> out;
  out.reserve(values.size());
  // Recompute each window sum so results do not depend on running-sum drift.
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t first =
        i + 1 >= static_cast<std::size_t>(window) ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t j = first; j <= i; ++j) sum += values[j];
    out.push_back(sum / static_cast<double>(i + 1 - first));
  }
  return out;
}

std::vector<double> reward_curve(std::span<const EpisodeRecord> records,
                                 int window) {
  std::vector<double> totals;
  totals.reserve(records.size());
  for (const auto& r : records) totals.push_back(r.total_reward);
  return moving_average(totals, window);
}

std::vector<std::int64_t> cumulative_failures(
    std::span<const EpisodeRecord> records) {
  std::vector<std::int64_t> out;
  out.reserve(records.size());
  std::int64_t count = 0;
  for (const auto& r : records) {
    if (r.outcome == Outcome::FailureScenario) ++count;
    out.push_back(count);
  }
  return out;
}

std::vector<EpisodeRecord> extract_edge_cases(
    std::span<const EpisodeRecord> records, int k) {
  if (k < 1) throw UsageError("edge-case count k must be >= 1");
  std::vector<const EpisodeRecord*> order;
  order.reserve(records.size());
  for (const auto& r : records) order.push_back(&r);
  const std::size_t take = std::min<std::size_t>(k, order.size());
  std::partial_sort(order.begin(), order.begin() + take, order.end(),
                    [](const EpisodeRecord* a, const EpisodeRecord* b) {
                      if (a->total_reward != b->total_reward) {
                        return a->total_reward > b->total_reward;
                      }
                      return a->episode_id < b->episode_id;
                    });
  std::vector<EpisodeRecord> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(*order[i]);
  return out;
}

std::optional<std::size_t> convergence_episode(std::span<const double> curve,
                                               double tolerance,
                                               std::size_t span) {
  if (span < 2) throw UsageError("convergence span must be >= 2");
  if (curve.size() < span) return std::nullopt;
  for (std::size_t i = 0; i + span <= curve.size(); ++i) {
    const auto [lo, hi] = std::minmax_element(curve.begin() + i,
                                              curve.begin() + i + span);
    if (*hi - *lo <= tolerance) return i;
  }
  return std::nullopt;
}

ValidationReport build_report(std::span<const EpisodeRecord> records,
                              const ValidationConfig& config) {
  if (records.empty()) throw UsageError("no episodes to report on");
  ValidationReport rep;
  rep.total_episodes = static_cast<std::int64_t>(records.size());
  rep.cumulative_failures = cumulative_failures(records);
  rep.failure_count = rep.cumulative_failures.back();
  rep.success_count = rep.total_episodes - rep.failure_count;
  rep.p_r = success_probability(rep.success_count, rep.total_episodes);
  rep.reward_moving_average = reward_curve(records, config.reward_window);
  for (const auto& ep : extract_edge_cases(records, config.top_k)) {
    rep.edge_cases.push_back({ep.episode_id, ep.total_reward});
  }
  return rep;
}

nlohmann::json to_json(const ValidationReport& rep) {
  nlohmann::json doc;
  doc["total_episodes"] = rep.total_episodes;
  doc["success_count"] = rep.success_count;
  doc["failure_count"] = rep.failure_count;
  doc["p_r"] = rep.p_r;
  doc["p_r_rounded"] = format_probability(rep.p_r);
  auto edges = nlohmann::json::array();
  for (const auto& e : rep.edge_cases) {
    edges.push_back({{"episode_id", e.episode_id},
                     {"total_reward", e.total_reward}});
  }
  doc["edge_cases"] = std::move(edges);
  if (!rep.reward_moving_average.empty()) {
    doc["final_reward_moving_average"] = rep.reward_moving_average.back();
  }
  return doc;
}

nlohmann::json to_json(const EpisodeRecord& ep) {
  auto steps = nlohmann::json::array();
  for (const auto& ts : ep.timesteps) {
    steps.push_back({{"step", ts.step},
                     {"t", ts.t},
                     {"action", ts.action},
                     {"ego_x", ts.ego_x},
                     {"ego_y", ts.ego_y},
                     {"ego_speed", ts.ego_speed},
                     {"ped_x", ts.ped_x},
                     {"ped_y", ts.ped_y},
                     {"ped_speed", ts.ped_speed},
                     {"d_eucl", ts.d_eucl},
                     {"d_rss", ts.d_rss},
                     {"in_roi", ts.in_roi},
                     {"collided", ts.collided},
                     {"reward", ts.reward},
                     {"classification", to_string(ts.classification)}});
  }
  return {{"episode_id", ep.episode_id},
          {"episode_seed", ep.episode_seed},
          {"term_reason", to_string(ep.term_reason)},
          {"total_reward", ep.total_reward},
          {"success_fraction", ep.success_fraction},
          {"outcome", to_string(ep.outcome)},
          {"timesteps", std::move(steps)}};
}

EpisodeRecord episode_from_json(const nlohmann::json& doc) {
  EpisodeRecord ep;
  ep.episode_id = doc.at("episode_id").get<std::int64_t>();
  ep.episode_seed = doc.at("episode_seed").get<std::uint64_t>();
  ep.term_reason =
      term_reason_from_string(doc.at("term_reason").get<std::string>());
  ep.total_reward = doc.at("total_reward").get<int>();
  ep.success_fraction = doc.at("success_fraction").get<double>();
  const auto outcome = doc.at("outcome").get<std::string>();
  if (outcome == "SuccessScenario") {
    ep.outcome = Outcome::SuccessScenario;
  } else if (outcome == "FailureScenario") {
    ep.outcome = Outcome::FailureScenario;
  } else {
    throw UsageError("unknown outcome: " + outcome);
  }
  for (const auto& s : doc.at("timesteps")) {
    TimestepRecord ts;
    ts.step = s.at("step").get<int>();
    ts.t = s.at("t").get<double>();
    ts.action = s.at("action").get<int>();
    ts.ego_x = s.at("ego_x").get<double>();
    ts.ego_y = s.at("ego_y").get<double>();
    ts.ego_speed = s.at("ego_speed").get<double>();
    ts.ped_x = s.at("ped_x").get<double>();
    ts.ped_y = s.at("ped_y").get<double>();
    ts.ped_speed = s.at("ped_speed").get<double>();
    ts.d_eucl = s.at("d_eucl").get<double>();
    ts.d_rss = s.at("d_rss").get<double>();
    ts.in_roi = s.at("in_roi").get<bool>();
    ts.collided = s.at("collided").get<bool>();
    ts.reward = s.at("reward").get<int>();
    const auto cls = s.at("classification").get<std::string>();
    if (cls == "FailureTs") {
      ts.classification = TimestepClass::FailureTs;
    } else if (cls == "SuccessTs") {
      ts.classification = TimestepClass::SuccessTs;
    } else {
      throw UsageError("unknown timestep classification: " + cls);
    }
    ep.timesteps.push_back(ts);
  }
  return ep;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct Series {
  std::string label;
  std::string color;
  std::vector<double> ys;
};

// Minimal line chart: shared x axis = index, one y axis fitted to all
// series.
std::string line_chart_svg(const std::string& title, const std::string& xlabel,
                           const std::vector<Series>& series) {
  constexpr double kW = 720, kH = 400, kLeft = 70, kRight = 20, kTop = 40,
                   kBottom = 50;
  double ymin = 0.0, ymax = 1.0;
  std::size_t n = 0;
  bool first = true;
  for (const auto& s : series) {
    n = std::max(n, s.ys.size());
    for (double y : s.ys) {
      if (first) {
        ymin = ymax = y;
        first = false;
      }
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double xmax = n > 1 ? static_cast<double>(n - 1) : 1.0;
  auto px = [&](double x) {
    return kLeft + x / xmax * (kW - kLeft - kRight);
  };
  auto py = [&](double y) {
    return kTop + (ymax - y) / (ymax - ymin) * (kH - kTop - kBottom);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
     << "\" height=\"" << kH << "\" font-family=\"sans-serif\" "
     << "font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" "
     << "font-size=\"15\">" << title << "</text>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\""
     << kW - kRight << "\" y2=\"" << kH - kBottom << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
     << "\" y2=\"" << kH - kBottom << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = ymin + (ymax - ymin) * k / 4.0;
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(y) + 4
       << "\" text-anchor=\"end\">" << fmt_double(y).substr(0, 8)
       << "</text>\n";
    const double x = xmax * k / 4.0;
    os << "<text x=\"" << px(x) << "\" y=\"" << kH - kBottom + 16
       << "\" text-anchor=\"middle\">" << static_cast<long long>(x)
       << "</text>\n";
  }
  os << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12
     << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  double legend_y = kTop + 4;
  for (const auto& s : series) {
    if (s.ys.empty()) continue;
    os << "<polyline fill=\"none\" stroke=\"" << s.color
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.ys.size(); ++i) {
      os << fmt_double(px(static_cast<double>(i))) << ','
         << fmt_double(py(s.ys[i])) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << kW - kRight - 4 << "\" y=\"" << legend_y
       << "\" text-anchor=\"end\" fill=\"" << s.color << "\">" << s.label
       << "</text>\n";
    legend_y += 16;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

std::string cumulative_failures_csv(const ValidationReport& rep) {
  std::ostringstream os;
  os << "episode,cumulative_failures\n";
  for (std::size_t i = 0; i < rep.cumulative_failures.size(); ++i) {
    os << i << ',' << rep.cumulative_failures[i] << '\n';
  }
  return os.str();
}

std::string reward_curve_csv(const ValidationReport& rep) {
  std::ostringstream os;
  os << "episode,reward_moving_average\n";
  for (std::size_t i = 0; i < rep.reward_moving_average.size(); ++i) {
    os << i << ',' << fmt_double(rep.reward_moving_average[i]) << '\n';
  }
  return os.str();
}

std::string cumulative_failures_svg(const ValidationReport& rep) {
  std::vector<double> ys(rep.cumulative_failures.begin(),
                         rep.cumulative_failures.end());
  return line_chart_svg("Cumulative failure scenarios", "episode",
                        {{"failures", "#c0392b", std::move(ys)}});
}

std::string reward_curve_svg(const ValidationReport& rep) {
  return line_chart_svg("Reward moving average", "episode",
                        {{"reward", "#2c3e50", rep.reward_moving_average}});
}

std::string episode_trace_svg(const EpisodeRecord& ep) {
  Series dist{"euclidean distance (m)", "#2471a3", {}};
  Series ped{"pedestrian speed (m/s)", "#c0392b", {}};
  Series ego{"ego speed (m/s)", "#229954", {}};
  Series fails{"failure timesteps (cumulative)", "#7d3c98", {}};
  double count = 0.0;
  for (const auto& ts : ep.timesteps) {
    dist.ys.push_back(ts.d_eucl);
    ped.ys.push_back(ts.ped_speed);
    ego.ys.push_back(ts.ego_speed);
    if (ts.classification == TimestepClass::FailureTs) count += 1.0;
    fails.ys.push_back(count);
  }
  return line_chart_svg("Episode " + std::to_string(ep.episode_id) +
                            " (total reward " +
                            std::to_string(ep.total_reward) + ")",
                        "timestep", {dist, ped, ego, fails});
}

}  // namespace edge_forge
