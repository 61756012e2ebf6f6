#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "cavroute/network.hpp"
#include "format.hpp"

namespace cavroute {
namespace {

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

void drop_comment(std::string& line) {
  auto tilde = line.find('~');
  if (tilde != std::string::npos) line.erase(tilde);
}

double to_number(const std::string& tok, const std::string& where) {
  try {
    std::size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw InputError(where + ": not a number: '" + tok + "'");
  }
}

int to_node_id(const std::string& tok, const std::string& where) {
  double v = to_number(tok, where);
  int n = int(v);
  if (double(n) != v || n < 1)
    throw InputError(where + ": not a valid node id: '" + tok + "'");
  return n;
}

/// Consumes metadata lines up to <END OF METADATA>; returns tag→value.
std::map<std::string, double> read_metadata(std::ifstream& in, int& lineno) {
  std::map<std::string, double> meta;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    drop_comment(line);
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() != '<') {
      // No metadata block at all; unread is impossible, so require one.
      throw InputError("line " + std::to_string(lineno) +
                       ": expected a <...> metadata tag");
    }
    auto close = line.find('>');
    if (close == std::string::npos)
      throw InputError("line " + std::to_string(lineno) + ": unclosed metadata tag");
    std::string tag = line.substr(1, close - 1);
    if (tag == "END OF METADATA") return meta;
    std::string value = strip(line.substr(close + 1));
    meta[tag] = value.empty()
                    ? 0.0
                    : to_number(value, "line " + std::to_string(lineno));
  }
  throw InputError("missing <END OF METADATA>");
}

}  // namespace

std::vector<Link> load_tntp_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open network file: " + path);
  int lineno = 0;
  auto meta = read_metadata(in, lineno);
  if (!meta.count("NUMBER OF NODES"))
    throw InputError(path + ": missing <NUMBER OF NODES>");
  if (!meta.count("NUMBER OF LINKS"))
    throw InputError(path + ": missing <NUMBER OF LINKS>");
  std::size_t expected_links = std::size_t(meta["NUMBER OF LINKS"]);

  std::vector<Link> links;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    drop_comment(line);
    line = strip(line);
    if (line.empty()) continue;
    std::string where = "line " + std::to_string(lineno);
    if (line.back() != ';')
      throw InputError(where + ": link row must end with ';'");
    line.pop_back();

    std::istringstream row(line);
    std::vector<std::string> tok;
    std::string t;
    while (row >> t) tok.push_back(t);
    // init term capacity length fft b power speed toll type
    if (tok.size() != 10)
      throw InputError(where + ": expected 10 columns, got " +
                       std::to_string(tok.size()));
    Link link;
    link.id = int(links.size()) + 1;
    link.tail = to_node_id(tok[0], where);
    link.head = to_node_id(tok[1], where);
    link.capacity = to_number(tok[2], where);
    link.length_mi = to_number(tok[3], where);
    link.free_flow_min = to_number(tok[4], where);
    for (std::size_t c = 5; c < 10; ++c) to_number(tok[c], where);
    links.push_back(link);
  }
  if (links.size() != expected_links)
    throw InputError(path + ": <NUMBER OF LINKS> says " +
                     std::to_string(expected_links) + " but " +
                     std::to_string(links.size()) + " rows were read");
  return links;
}

std::vector<ODPair> load_tntp_trips(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trips file: " + path);
  int lineno = 0;
  read_metadata(in, lineno);

  std::map<std::pair<int, int>, double> demand;
  std::vector<std::pair<int, int>> order;
  int origin = -1;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    drop_comment(line);
    line = strip(line);
    if (line.empty()) continue;
    std::string where = "line " + std::to_string(lineno);
    if (line.rfind("Origin", 0) == 0) {
      origin = to_node_id(strip(line.substr(6)), where);
      continue;
    }
    if (origin < 0)
      throw InputError(where + ": trip entry before any Origin header");
    std::istringstream row(line);
    std::string entry;
    while (std::getline(row, entry, ';')) {
      entry = strip(entry);
      if (entry.empty()) continue;
      auto colon = entry.find(':');
      if (colon == std::string::npos)
        throw InputError(where + ": expected 'destination : flow;'");
      int dest = to_node_id(strip(entry.substr(0, colon)), where);
      double flow = to_number(strip(entry.substr(colon + 1)), where);
      if (flow < 0.0) throw InputError(where + ": negative demand");
      if (flow == 0.0) continue;
      auto key = std::make_pair(origin, dest);
      if (!demand.count(key)) order.push_back(key);
      demand[key] += flow;
    }
  }

  std::vector<ODPair> trips;
  trips.reserve(order.size());
  for (const auto& key : order)
    trips.push_back({key.first, key.second, demand[key]});
  return trips;
}

void save_tntp_network(const std::string& path, const Network& net) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write network file: " + path);
  out << "<NUMBER OF ZONES> " << net.num_nodes() << "\n";
  out << "<NUMBER OF NODES> " << net.num_nodes() << "\n";
  out << "<FIRST THRU NODE> 1\n";
  out << "<NUMBER OF LINKS> " << net.num_links() << "\n";
  out << "<END OF METADATA>\n";
  out << "~ init term capacity length fft b power speed toll type ;\n";
  for (const Link& link : net.links) {
    out << link.tail << " " << link.head << " " << fmt_double(link.capacity)
        << " " << fmt_double(link.length_mi) << " "
        << fmt_double(link.free_flow_min) << " 0.15 4 0 0 1 ;\n";
  }
  if (!out) throw IoError("failed writing network file: " + path);
}

void save_tntp_trips(const std::string& path, const std::vector<ODPair>& trips) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trips file: " + path);
  double total = 0.0;
  for (const ODPair& od : trips) total += od.demand;
  out << "<NUMBER OF ZONES> " << trips.size() << "\n";
  out << "<TOTAL OD FLOW> " << fmt_double(total) << "\n";
  out << "<END OF METADATA>\n";
  int last_origin = -1;
  for (const ODPair& od : trips) {
    if (od.origin != last_origin) {
      out << "Origin " << od.origin << "\n";
      last_origin = od.origin;
    }
    out << "    " << od.destination << " : " << fmt_double(od.demand) << ";\n";
  }
  if (!out) throw IoError("failed writing trips file: " + path);
}

}  // namespace cavroute
