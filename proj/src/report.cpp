#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "s3a/error.hpp"
#include "s3a/protocol.hpp"

namespace s3a {

namespace {

using nlohmann::json;

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * v);
  return buf;
}

std::string mean_std(const CellStats& c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f%% (+/- %.1f%%)", 100.0 * c.mean_accuracy,
                100.0 * c.std_accuracy);
  return buf;
}

/// Left-aligned columns separated by two spaces, with a dashed rule under the header.
std::string render_grid(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string>& row) {
    std::string out;
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += row[c];
      if (c + 1 < row.size()) out += std::string(width[c] - row[c].size() + 2, ' ');
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = line(rows.front());
  std::vector<std::string> rule;
  for (std::size_t w : width) rule.emplace_back(w, '-');
  out += line(rule);
  for (std::size_t r = 1; r < rows.size(); ++r) out += line(rows[r]);
  return out;
}

}  // namespace

std::string report_to_json(const EvalReport& r) {
  json cells = json::array();
  for (const auto& [key, c] : r.cells) {
    cells.push_back({{"train", std::get<0>(key)},
                     {"test", std::get<1>(key)},
                     {"algorithm", std::get<2>(key)},
                     {"mean_accuracy", c.mean_accuracy},
                     {"std_accuracy", c.std_accuracy},
                     {"n_trials", c.n_trials},
                     {"trial_accuracies", c.trial_accuracies}});
  }
  json breakdowns = json::array();
  for (const auto& [alg, cells_by_key] : r.breakdowns) {
    for (const auto& [key, acc] : cells_by_key) {
      breakdowns.push_back({{"algorithm", alg},
                            {"gender", key.first},
                            {"tool", tool_group_name(key.second)},
                            {"accuracy", acc}});
    }
  }
  json roc = json::object();
  for (const auto& [alg, points] : r.roc) {
    json pts = json::array();
    for (const auto& p : points) pts.push_back({p.fpr, p.tpr});
    roc[alg] = std::move(pts);
  }
  const json j = {{"protocol", r.protocol}, {"seed", r.seed},   {"groups", r.groups},
                  {"algorithms", r.algorithms}, {"cells", cells}, {"breakdowns", breakdowns},
                  {"roc", roc}};
  return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    EvalReport r;
    r.protocol = j.at("protocol").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.groups = j.at("groups").get<std::vector<std::string>>();
    r.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    for (const auto& c : j.at("cells")) {
      CellStats s;
      s.mean_accuracy = c.at("mean_accuracy").get<double>();
      s.std_accuracy = c.at("std_accuracy").get<double>();
      s.n_trials = c.at("n_trials").get<std::size_t>();
      s.trial_accuracies = c.at("trial_accuracies").get<std::vector<double>>();
      r.cells[{c.at("train").get<std::string>(), c.at("test").get<std::string>(),
               c.at("algorithm").get<std::string>()}] = std::move(s);
    }
    for (const auto& b : j.at("breakdowns")) {
      r.breakdowns[b.at("algorithm").get<std::string>()][{
          b.at("gender").get<std::string>(),
          parse_tool_group(b.at("tool").get<std::string>())}] = b.at("accuracy").get<double>();
    }
    for (const auto& [alg, pts] : j.at("roc").items()) {
      auto& out = r.roc[alg];
      for (const auto& p : pts) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("EvalReport: ") + e.what());
  }
}

std::string render_cross_table(const EvalReport& r) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"Train", "Algorithm"};
  for (const auto& g : r.groups) header.push_back(g);
  rows.push_back(header);
  for (const auto& train : r.groups) {
    bool first = true;
    for (const auto& alg : r.algorithms) {
      std::vector<std::string> row{first ? train : "", alg};
      first = false;
      for (const auto& test : r.groups) {
        auto it = r.cells.find({train, test, alg});
        row.push_back(it == r.cells.end() ? "n/a" : mean_std(it->second));
      }
      rows.push_back(row);
    }
  }
  std::string title = r.protocol == "cross_ethnicity"
                          ? "Cross-ethnicity evaluation (rows: training set, columns: testing set)\n"
                          : "Combined evaluation\n";
  return title + render_grid(rows);
}

std::string render_breakdown_table(const EvalReport& r) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Algorithm", "Female Tool 1", "Female Tool 2", "Male Tool 1", "Male Tool 2"});
  for (const auto& alg : r.algorithms) {
    std::vector<std::string> row{alg};
    const auto it = r.breakdowns.find(alg);
    for (const char* gender : {"F", "M"}) {
      for (ToolGroup t : {ToolGroup::Tool1, ToolGroup::Tool2}) {
        if (it == r.breakdowns.end()) {
          row.push_back("n/a");
          continue;
        }
        const auto cell = it->second.find({gender, t});
        row.push_back(cell == it->second.end() ? "n/a" : percent(cell->second));
      }
    }
    rows.push_back(row);
  }
  return "Accuracy by gender and retouching tool\n" + render_grid(rows);
}

std::string render_roc_csv(const std::vector<RocPoint>& points) {
  std::string out = "fpr,tpr\n";
  char buf[64];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.fpr, p.tpr);
    out += buf;
  }
  return out;
}

}  // namespace s3a
