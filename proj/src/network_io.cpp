#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sips/errors.hpp"
#include "sips/network.hpp"

namespace sips {

using nlohmann::json;

namespace {

json edge_list(const Eigen::MatrixXd& m) {
  json list = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) list.push_back({{"i", i}, {"j", j}, {"rate", m(i, j)}});
  return list;
}

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

// Maps a byte offset of the parser failure onto 1-based line/column.
std::pair<int, int> locate(const std::string& text, std::size_t byte) {
  int line = 1, column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t k = 0; k < end; ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

const json& field(const json& doc, const char* name) {
  if (!doc.is_object() || !doc.contains(name))
    throw ParseError(std::string("missing field '") + name + "'");
  return doc.at(name);
}

Eigen::VectorXd read_vector(const json& doc, const char* name, int n) {
  const json& arr = field(doc, name);
  if (!arr.is_array() || static_cast<int>(arr.size()) != n)
    throw ParseError(std::string("field '") + name + "' must be an array of length n");
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    if (!arr[i].is_number()) throw ParseError(std::string("field '") + name + "' has a non-number");
    v[i] = arr[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd read_edges(const json& doc, const char* name, int n) {
  const json& arr = field(doc, name);
  if (!arr.is_array()) throw ParseError(std::string("field '") + name + "' must be an array");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> seen =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const json& rec = arr[k];
    const std::string where = std::string(name) + "[" + std::to_string(k) + "]";
    if (!rec.is_object() || !rec.contains("i") || !rec.contains("j") || !rec.contains("rate"))
      throw ParseError(where + " must be an object {i, j, rate}");
    if (!rec["i"].is_number_integer() || !rec["j"].is_number_integer() || !rec["rate"].is_number())
      throw ParseError(where + " has fields of the wrong type");
    const auto i = rec["i"].get<long long>();
    const auto j = rec["j"].get<long long>();
    if (i < 0 || j < 0 || i >= n || j >= n) throw ParseError(where + " node id out of range");
    if (seen(i, j)) throw ParseError(where + " duplicates an earlier entry");
    seen(i, j) = true;
    m(i, j) = rec["rate"].get<double>();
  }
  return m;
}

}  // namespace

std::string to_json_text(const RateNetwork& net) {
  json doc;
  doc["n"] = net.n;
  doc["gamma"] = vector_json(net.gamma);
  doc["alpha"] = vector_json(net.alpha);
  doc["beta"] = edge_list(net.beta);
  doc["delta1"] = edge_list(net.delta1);
  doc["delta2"] = edge_list(net.delta2);
  return doc.dump(1) + "\n";
}

RateNetwork from_json_text(const std::string& text, const ValidateOptions& opts) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = locate(text, e.byte);
    throw ParseError(e.what(), line, column);
  }
  const json& n_field = field(doc, "n");
  if (!n_field.is_number_integer() || n_field.get<long long>() < 1)
    throw ParseError("field 'n' must be a positive integer");
  const int n = n_field.get<int>();

  RateNetwork net;
  net.n = n;
  net.gamma = read_vector(doc, "gamma", n);
  net.alpha = read_vector(doc, "alpha", n);
  net.beta = read_edges(doc, "beta", n);
  net.delta1 = read_edges(doc, "delta1", n);
  net.delta2 = read_edges(doc, "delta2", n);
  require_valid(net, opts);
  return net;
}

void save(const RateNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << to_json_text(net);
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

RateNetwork load(const std::filesystem::path& path, const ValidateOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str(), opts);
}

}  // namespace sips
