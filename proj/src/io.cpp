#include "rankbench/io.hpp"

#include <fstream>

#include <json.hpp>

namespace rankbench {

using nlohmann::json;

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return j;
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

double entry_to_json(double x) { return x; }
json entry_to_json(Rank r) {
  if (r.is_infinite()) return json("inf");
  return json(r.value());
}

void entry_from_json(const json& j, double& out) {
  if (!j.is_number()) throw IoError("expected a numeric table entry");
  out = j.get<double>();
}
void entry_from_json(const json& j, Rank& out) {
  if (j.is_string() && j.get<std::string>() == "inf") {
    out = Rank::infinity();
    return;
  }
  if (!j.is_number_unsigned()) throw IoError("rank entries must be non-negative integers or \"inf\"");
  out = Rank(j.get<std::uint32_t>());
}

template <class S>
std::vector<S> row_from_json(const json& j) {
  if (!j.is_array()) throw IoError("expected an array of entries");
  std::vector<S> row(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) entry_from_json(j[i], row[i]);
  return row;
}

template <class S>
json row_to_json(const std::vector<S>& row) {
  json j = json::array();
  for (const S& x : row) j.push_back(entry_to_json(x));
  return j;
}

template <class S>
BasicNetwork<S> network_from_json(const json& j, bool allow_noisy) {
  if (!j.is_object() || !j.contains("variables") || !j.contains("nodes"))
    throw IoError("network file needs top-level 'variables' and 'nodes'");

  BasicNetwork<S> net;
  for (const json& v : j.at("variables")) {
    std::vector<std::string> domain;
    for (const json& d : v.at("domain")) domain.push_back(d.get<std::string>());
    net.add_variable(v.at("name").get<std::string>(), std::move(domain));
  }

  for (const json& n : j.at("nodes")) {
    const auto name = n.at("name").get<std::string>();
    if (!net.has_variable(name)) throw IoError("node for undeclared variable: " + name);
    std::vector<std::string> parents;
    if (n.contains("parents"))
      for (const json& p : n.at("parents")) parents.push_back(p.get<std::string>());
    const auto kind = n.at("kind").get<std::string>();

    if (kind == "prior") {
      net.set_prior(name, row_from_json<S>(n.at("prior")));
    } else if (kind == "table") {
      std::vector<std::vector<S>> rows;
      for (const json& r : n.at("rows")) rows.push_back(row_from_json<S>(r));
      net.set_table(name, std::move(parents), std::move(rows));
    } else if (kind == "noisy-or" && allow_noisy) {
      if constexpr (std::is_same_v<S, double>) {
        std::vector<double> strengths;
        for (const json& s : n.at("strengths")) strengths.push_back(s.get<double>());
        net.set_noisy_or(name, std::move(parents), std::move(strengths),
                         n.at("leak").get<double>());
      }
    } else if (kind == "noisy-max" && allow_noisy) {
      if constexpr (std::is_same_v<S, double>) {
        std::vector<std::vector<std::vector<double>>> strengths;
        for (const json& per_parent : n.at("strengths")) {
          std::vector<std::vector<double>> vecs;
          for (const json& v : per_parent) vecs.push_back(row_from_json<double>(v));
          strengths.push_back(std::move(vecs));
        }
        net.set_noisy_max(name, std::move(parents), std::move(strengths),
                          row_from_json<double>(n.at("leak")));
      }
    } else {
      throw IoError("unsupported node kind '" + kind + "' for " + name);
    }
  }
  return net;
}

template <class S>
json network_to_json(const BasicNetwork<S>& net) {
  json vars = json::array();
  for (const Variable& v : net.variables())
    vars.push_back(json{{"name", v.name}, {"domain", v.domain}});

  json nodes = json::array();
  for (int i = 0; i < static_cast<int>(net.size()); ++i) {
    const Node<S>& n = net.node(i);
    json nj{{"name", net.variable(i).name}, {"parents", n.parents}};
    if (const auto* p = std::get_if<PriorSpec<S>>(&n.spec)) {
      nj["kind"] = "prior";
      nj["prior"] = row_to_json(p->dist);
    } else if (const auto* t = std::get_if<TableSpec<S>>(&n.spec)) {
      nj["kind"] = "table";
      json rows = json::array();
      for (const auto& r : t->rows) rows.push_back(row_to_json(r));
      nj["rows"] = std::move(rows);
    } else if (const auto* o = std::get_if<NoisyOrSpec>(&n.spec)) {
      nj["kind"] = "noisy-or";
      nj["strengths"] = o->strengths;
      nj["leak"] = o->leak;
    } else if (const auto* mx = std::get_if<NoisyMaxSpec>(&n.spec)) {
      nj["kind"] = "noisy-max";
      nj["strengths"] = mx->strengths;
      nj["leak"] = mx->leak;
    }
    nodes.push_back(std::move(nj));
  }
  return json{{"variables", std::move(vars)}, {"nodes", std::move(nodes)}};
}

}  // namespace

Network read_network(const std::string& path) {
  return network_from_json<double>(load_json(path), true);
}

void write_network(const Network& net, const std::string& path) {
  save_json(network_to_json(net), path);
}

RankNetwork read_rank_network(const std::string& path) {
  return network_from_json<Rank>(load_json(path), false);
}

void write_rank_network(const RankNetwork& net, const std::string& path) {
  save_json(network_to_json(net), path);
}

std::vector<TestCase> read_cases(const std::string& path) {
  const json j = load_json(path);
  if (!j.is_array()) throw IoError("case file must be a JSON array");
  std::vector<TestCase> cases;
  for (const json& c : j) {
    TestCase tc;
    tc.id = c.at("case-id").get<std::string>();
    tc.true_fault = c.at("true-fault").get<std::string>();
    tc.n_findings = c.at("n-findings").get<int>();
    for (const auto& [k, v] : c.at("evidence").items()) tc.evidence[k] = v.get<std::string>();
    if (static_cast<int>(tc.evidence.size()) != tc.n_findings)
      throw IoError("case " + tc.id + ": n-findings does not match the evidence size");
    cases.push_back(std::move(tc));
  }
  return cases;
}

void write_cases(const std::vector<TestCase>& cases, const std::string& path) {
  json out = json::array();
  for (const TestCase& tc : cases) {
    json ev = json::object();
    for (const auto& [k, v] : tc.evidence) ev[k] = v;
    out.push_back(json{{"case-id", tc.id},
                       {"true-fault", tc.true_fault},
                       {"n-findings", tc.n_findings},
                       {"evidence", std::move(ev)}});
  }
  save_json(out, path);
}

std::map<std::string, double> read_prior_overrides(const std::string& path) {
  const json j = load_json(path);
  if (!j.is_object()) throw IoError("prior-override file must be a JSON object");
  std::map<std::string, double> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw IoError("prior override for " + k + " is not a number");
    out[k] = v.get<double>();
  }
  return out;
}

std::vector<std::string> read_case_subset(const std::string& path) {
  const json j = load_json(path);
  if (!j.is_array()) throw IoError("subset file must be a JSON array of case ids");
  std::vector<std::string> ids;
  for (const json& id : j) ids.push_back(id.get<std::string>());
  return ids;
}

}  // namespace rankbench
