// Copyright 2026 The C2RoPE Authors
// SPDX-License-Identifier: Apache-2.0

#include "c2rope/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "c2rope/errors.hpp"

namespace c2rope {

std::string Provenance::comment() const {
  return "# seed=" + std::to_string(seed) + " variant=" + variant +
         " normalization=" + normalization;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string indices_csv(const MultiViewLayout& layout) {
  const auto triplets = triplet_indices(layout);
  std::ostringstream out;
  out << "view,row,col,m,x,y\n";
  for (std::size_t p = 0; p < triplets.size(); ++p) {
    const TokenSlot slot = locate(layout, p);
    const TripletIndex& t = triplets[p];
    if (slot.is_text) {
      out << "0,0," << slot.text_ordinal + 1;
    } else {
      out << slot.view + 1 << ',' << slot.row + 1 << ',' << slot.col + 1;
    }
    out << ',' << t.m << ',' << t.x << ',' << t.y << '\n';
  }
  return out.str();
}

std::string allocation_csv(const FrequencyAllocation& alloc) {
  std::ostringstream out;
  out << "pair,component,theta\n";
  const auto pairs = alloc.pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out << i + 1 << ',' << to_string(pairs[i].component) << ',' << format_double(pairs[i].theta)
        << '\n';
  }
  return out.str();
}

std::string mask_csv(const AttentionMask& mask) {
  std::string out;
  out.reserve(mask.size() * mask.size() * 2);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    for (std::size_t j = 0; j < mask.size(); ++j) {
      out += mask(i, j) ? '1' : '0';
      out += j + 1 == mask.size() ? '\n' : ',';
    }
  }
  return out;
}

std::string mask_pgm(const AttentionMask& mask) {
  std::string out = "P5\n" + std::to_string(mask.size()) + " " + std::to_string(mask.size()) +
                    "\n255\n";
  for (std::size_t i = 0; i < mask.size(); ++i) {
    for (std::size_t j = 0; j < mask.size(); ++j) {
      out += static_cast<char>(mask(i, j) ? 255 : 0);
    }
  }
  return out;
}

std::string decay_csv(std::span<const DecaySeries> series, const Provenance& prov) {
  std::ostringstream out;
  out << prov.comment() << '\n';
  out << "variant,delta,mean_abs_score,stderr,samples\n";
  for (const auto& s : series) {
    for (const auto& b : s.bins) {
      out << to_string(s.variant) << ',' << b.delta << ',' << format_double(b.mean_abs_score)
          << ',' << format_double(b.std_error) << ',' << b.samples << '\n';
    }
  }
  return out.str();
}

std::string flow_map_csv(const FlowMap& map, const Provenance& prov) {
  std::ostringstream out;
  out << prov.comment() << '\n';
  out << "view,row,col,value\n";
  for (std::size_t v = 0; v < map.views; ++v) {
    for (std::int64_t r = 0; r < map.grid.rows; ++r) {
      for (std::int64_t c = 0; c < map.grid.cols; ++c) {
        out << v + 1 << ',' << r + 1 << ',' << c + 1 << ',' << format_double(map.at(v, r, c))
            << '\n';
      }
    }
  }
  return out.str();
}

std::string matrix_csv(const Matrix& m) {
  std::string out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out += format_double(m(r, c));
      out += c + 1 == m.cols() ? '\n' : ',';
    }
  }
  return out;
}

namespace {

std::pair<double, double> value_range(const FlowMap& map) {
  if (map.values.empty()) {
    return {0.0, 0.0};
  }
  const auto [lo, hi] = std::minmax_element(map.values.begin(), map.values.end());
  return {*lo, *hi};
}

double scaled(double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; }

// Dark blue -> teal -> yellow ramp.
std::string ramp_colour(double t) {
  constexpr std::array<std::array<double, 3>, 3> stops = {
      {{0.07, 0.04, 0.33}, {0.13, 0.57, 0.55}, {0.99, 0.91, 0.14}}};
  t = std::clamp(t, 0.0, 1.0);
  const std::size_t i = t < 0.5 ? 0 : 1;
  const double f = t < 0.5 ? t * 2.0 : (t - 0.5) * 2.0;
  char buf[8];
  std::array<int, 3> rgb{};
  for (std::size_t k = 0; k < 3; ++k) {
    rgb[k] = static_cast<int>(std::lround(255.0 * (stops[i][k] + f * (stops[i + 1][k] - stops[i][k]))));
  }
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

}  // namespace

std::string flow_map_pgm(const FlowMap& map, const Provenance& prov) {
  const auto [lo, hi] = value_range(map);
  const std::int64_t height = map.grid.rows * static_cast<std::int64_t>(map.views);
  std::string out = "P5\n" + prov.comment() + "\n" + std::to_string(map.grid.cols) + " " +
                    std::to_string(height) + "\n255\n";
  for (double v : map.values) {
    out += static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * scaled(v, lo, hi))));
  }
  return out;
}

std::string flow_map_svg(const FlowMap& map, const Provenance& prov, std::string_view title) {
  constexpr int cell = 16;
  constexpr int margin = 24;
  constexpr int legend_width = 16;
  const auto [lo, hi] = value_range(map);
  const auto rows = static_cast<int>(map.grid.rows);
  const auto cols = static_cast<int>(map.grid.cols);
  const int views = static_cast<int>(map.views);
  const int panels_width = views * (cols * cell + margin);
  const int width = margin + panels_width + legend_width + 4 * margin;
  const int height = 2 * margin + rows * cell + margin;

  std::ostringstream out;
  out << "<!-- " << prov.comment().substr(2) << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"" << margin - 8 << "\">" << title << "</text>\n";
  for (int v = 0; v < views; ++v) {
    const int x0 = margin + v * (cols * cell + margin);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double value = map.at(static_cast<std::size_t>(v), r, c);
        out << "<rect x=\"" << x0 + c * cell << "\" y=\"" << margin + r * cell << "\" width=\""
            << cell << "\" height=\"" << cell << "\" fill=\"" << ramp_colour(scaled(value, lo, hi))
            << "\"><title>view " << v + 1 << " row " << r + 1 << " col " << c + 1 << ": "
            << format_double(value) << "</title></rect>\n";
      }
    }
    if (views > 1) {
      out << "<text x=\"" << x0 << "\" y=\"" << margin + rows * cell + 14 << "\">view " << v + 1
          << "</text>\n";
    }
  }

  // Legend: vertical ramp, max at the top.
  const int lx = margin + panels_width;
  constexpr int steps = 32;
  const double step_h = static_cast<double>(rows * cell) / steps;
  for (int s = 0; s < steps; ++s) {
    const double t = 1.0 - (static_cast<double>(s) + 0.5) / steps;
    out << "<rect x=\"" << lx << "\" y=\"" << format_double(margin + s * step_h) << "\" width=\""
        << legend_width << "\" height=\"" << format_double(step_h + 0.5) << "\" fill=\""
        << ramp_colour(t) << "\"/>\n";
  }
  out << "<text x=\"" << lx + legend_width + 4 << "\" y=\"" << margin + 10 << "\">"
      << format_double(hi) << "</text>\n";
  out << "<text x=\"" << lx + legend_width + 4 << "\" y=\"" << margin + rows * cell << "\">"
      << format_double(lo) << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string flow_series_csv(std::span<const PositionFlow> series, const Provenance& prov) {
  std::ostringstream out;
  out << prov.comment() << '\n';
  out << "m,flow\n";
  for (const auto& p : series) {
    out << p.m << ',' << format_double(p.flow) << '\n';
  }
  return out.str();
}

std::vector<PositionFlow> parse_flow_series(std::string_view text) {
  std::vector<PositionFlow> series;
  bool header_seen = false;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    if (!header_seen) {
      if (line != "m,flow") {
        throw InputError("flow series: expected header 'm,flow'");
      }
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) {
      throw InputError("flow series: malformed line '" + std::string(line) + "'");
    }
    PositionFlow p;
    const auto m_part = line.substr(0, comma);
    const auto f_part = line.substr(comma + 1);
    const auto r1 = std::from_chars(m_part.data(), m_part.data() + m_part.size(), p.m);
    const auto r2 = std::from_chars(f_part.data(), f_part.data() + f_part.size(), p.flow);
    if (r1.ec != std::errc{} || r2.ec != std::errc{} || r1.ptr != m_part.data() + m_part.size() ||
        r2.ptr != f_part.data() + f_part.size()) {
      throw InputError("flow series: malformed line '" + std::string(line) + "'");
    }
    series.push_back(p);
  }
  return series;
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw InputError("cannot open " + tmp.string() + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw InputError("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace c2rope
