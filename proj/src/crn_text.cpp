#include <cctype>
#include <sstream>

#include "bfcnn/crn.hpp"
#include "bfcnn/csv.hpp"

namespace bfcnn {

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

// "2 A + B" or "0". Species names are whitespace-free tokens; a lone "+" separates terms.
std::vector<std::pair<std::string, unsigned>> parse_complex(const std::string& text, std::size_t line) {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) tokens.push_back(t);
  if (tokens.empty()) throw ParseError("empty complex (write 0 for none)", line);
  if (tokens.size() == 1 && tokens[0] == "0") return {};

  std::vector<std::pair<std::string, unsigned>> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    unsigned coeff = 1;
    if (all_digits(tokens[i])) {
      if (i + 1 >= tokens.size() || tokens[i + 1] == "+")
        throw ParseError("coefficient '" + tokens[i] + "' without species", line);
      coeff = static_cast<unsigned>(std::stoul(tokens[i]));
      ++i;
    }
    if (tokens[i] == "+") throw ParseError("unexpected '+'", line);
    out.emplace_back(tokens[i], coeff);
    ++i;
    if (i < tokens.size()) {
      if (tokens[i] != "+") throw ParseError("expected '+' before '" + tokens[i] + "'", line);
      ++i;
      if (i == tokens.size()) throw ParseError("dangling '+'", line);
    }
  }
  return out;
}

std::string complex_text(const Crn& crn, const std::vector<Term>& side) {
  if (side.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < side.size(); ++i) {
    if (i) out += " + ";
    if (side[i].coeff != 1) out += std::to_string(side[i].coeff) + " ";
    out += crn.name(side[i].species);
  }
  return out;
}

}  // namespace

Crn parse_crn_text(std::string_view text) {
  CrnBuilder b;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;

    auto semi = line.find(';');
    if (semi == std::string::npos) throw ParseError("missing '; k=<rate>'", line_no);
    std::string body = line.substr(0, semi);
    std::string rate_part = trim(line.substr(semi + 1));
    if (rate_part.rfind("k=", 0) != 0) throw ParseError("rate must be written k=<value>", line_no);
    double rate = 0.0;
    try {
      rate = parse_double(rate_part.substr(2));
    } catch (const std::invalid_argument&) {
      throw ParseError("bad rate '" + rate_part.substr(2) + "'", line_no);
    }

    auto arrow = body.find("->");
    if (arrow == std::string::npos) throw ParseError("missing '->'", line_no);
    if (body.find("->", arrow + 2) != std::string::npos) throw ParseError("more than one '->'", line_no);
    auto lhs = parse_complex(body.substr(0, arrow), line_no);
    auto rhs = parse_complex(body.substr(arrow + 2), line_no);
    try {
      b.add_terms(lhs, rhs, rate);
    } catch (const StructuralError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return b.build();
}

std::string to_text(const Crn& crn) {
  std::string out;
  for (const auto& r : crn.reactions()) {
    out += complex_text(crn, r.reactants);
    out += " -> ";
    out += complex_text(crn, r.products);
    out += " ; k=" + fmt(r.rate) + "\n";
  }
  return out;
}

}  // namespace bfcnn
