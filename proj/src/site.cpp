#include "brwre/site.hpp"

#include <charconv>
#include <stdexcept>

namespace brwre {

void check_dimension(int d) {
  if (d < 1 || d > kMaxDim)
    throw std::invalid_argument("dimension " + std::to_string(d) + " outside [1, " +
                                std::to_string(kMaxDim) + "]");
}

std::string to_string(const Site& x, int d) {
  std::string s;
  for (int i = 0; i < d; ++i) {
    if (i) s += ',';
    s += std::to_string(x[i]);
  }
  return s;
}

Site parse_site(std::string_view text, int d) {
  Site s;
  int i = 0;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    const std::string_view tok = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    if (i >= d) throw std::invalid_argument("site '" + std::string(text) + "' has more than " + std::to_string(d) + " coordinates");
    Coord v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty())
      throw std::invalid_argument("malformed site coordinate '" + std::string(tok) + "'");
    s[i++] = v;
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (i != d)
    throw std::invalid_argument("site '" + std::string(text) + "' has " + std::to_string(i) +
                                " coordinates, expected " + std::to_string(d));
  return s;
}

}  // namespace brwre
