#include "abc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "abc/errors.hpp"

namespace abc {

namespace {

constexpr double kFloor = 1e-6;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, std::size_t line_no,
                    const char* what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) {
    std::ostringstream os;
    os << "csv line " << line_no << ": bad " << what << " value '" << s << "'";
    throw config_error(os.str());
  }
  return v;
}

struct Series {
  std::vector<std::pair<double, double>> points;  // (snr, ber)
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
                          "#bcbd22", "#7f7f7f"};

}  // namespace

std::vector<PlotRow> read_results_csv(std::istream& is) {
  std::vector<PlotRow> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t snr_col = 0, det_col = 0, ber_col = 0, ncols = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (!have_header) {
      bool snr_ok = false, det_ok = false, ber_ok = false;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == "snr_db") { snr_col = i; snr_ok = true; }
        if (fields[i] == "detector") { det_col = i; det_ok = true; }
        if (fields[i] == "ber") { ber_col = i; ber_ok = true; }
      }
      if (!snr_ok || !det_ok || !ber_ok) {
        std::ostringstream os;
        os << "csv line " << line_no
           << ": header must name snr_db, detector and ber columns";
        throw config_error(os.str());
      }
      ncols = fields.size();
      have_header = true;
      continue;
    }
    if (fields.size() != ncols) {
      std::ostringstream os;
      os << "csv line " << line_no << ": expected " << ncols
         << " fields, found " << fields.size();
      throw config_error(os.str());
    }
    PlotRow row;
    row.detector = fields[det_col];
    row.snr_db = parse_double(fields[snr_col], line_no, "snr_db");
    row.ber = parse_double(fields[ber_col], line_no, "ber");
    if (row.detector.empty()) {
      std::ostringstream os;
      os << "csv line " << line_no << ": empty detector field";
      throw config_error(os.str());
    }
    if (row.ber < 0.0 || row.ber > 1.0) {
      std::ostringstream os;
      os << "csv line " << line_no << ": ber out of [0, 1]";
      throw config_error(os.str());
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) throw config_error("csv line 1: missing header row");
  return rows;
}

void write_svg(std::ostream& os, const std::vector<PlotRow>& rows,
               const std::string& title) {
  if (rows.empty()) throw config_error("plot: no data rows");

  std::map<std::string, Series> series;
  std::vector<std::string> order;
  double snr_min = rows.front().snr_db, snr_max = snr_min;
  for (const auto& r : rows) {
    if (!series.count(r.detector)) order.push_back(r.detector);
    series[r.detector].points.emplace_back(r.snr_db, r.ber);
    snr_min = std::min(snr_min, r.snr_db);
    snr_max = std::max(snr_max, r.snr_db);
  }
  for (auto& [name, s] : series)
    std::sort(s.points.begin(), s.points.end());
  if (snr_max == snr_min) {
    snr_min -= 1.0;
    snr_max += 1.0;
  }

  const double w = 760, h = 520;
  const double ml = 70, mr = 170, mt = 46, mb = 52;
  const double pw = w - ml - mr, ph = h - mt - mb;
  const double ly_top = 0.0;                 // log10(1)
  const double ly_bot = std::log10(kFloor);  // -6

  auto sx = [&](double snr) {
    return ml + pw * (snr - snr_min) / (snr_max - snr_min);
  };
  auto sy = [&](double ber) {
    const double v = std::log10(std::max(ber, kFloor));
    return mt + ph * (ly_top - v) / (ly_top - ly_bot);
  };

  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
     << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h
     << "\">\n";
  os << "<rect width=\"" << w << "\" height=\"" << h
     << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << (ml + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"15\">"
     << title << "</text>\n";

  // y grid: decades from 1 down to the floor
  for (int d = 0; d >= static_cast<int>(ly_bot); --d) {
    const double y = sy(std::pow(10.0, d));
    os << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << (ml + pw)
       << "\" y2=\"" << y << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << (ml - 8) << "\" y=\"" << (y + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">1e" << d << "</text>\n";
  }
  // x ticks: at most ~9, multiples of a round step
  const double span = snr_max - snr_min;
  double step = 1.0;
  while (span / step > 9.0) step *= (step < 4.0 ? 2.5 : 2.0);
  for (double t = std::ceil(snr_min / step) * step; t <= snr_max + 1e-9;
       t += step) {
    const double x = sx(t);
    os << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x
       << "\" y2=\"" << (mt + ph) << "\" stroke=\"#eeeeee\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << (mt + ph + 18)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">" << t << "</text>\n";
  }
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
     << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#444444\"/>\n";
  os << "<text x=\"" << (ml + pw / 2) << "\" y=\"" << (h - 12)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\">SNR (dB)</text>\n";
  os << "<text x=\"18\" y=\"" << (mt + ph / 2)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\" transform=\"rotate(-90 18 " << (mt + ph / 2)
     << ")\">BER</text>\n";

  std::size_t ci = 0;
  for (const auto& name : order) {
    const auto& s = series[name];
    const char* color = kPalette[ci % (sizeof(kPalette) / sizeof(*kPalette))];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.6\" points=\"";
    for (const auto& [snr, ber] : s.points)
      os << sx(snr) << ',' << sy(ber) << ' ';
    os << "\"/>\n";
    for (const auto& [snr, ber] : s.points) {
      if (ber > 0.0) {
        os << "<circle cx=\"" << sx(snr) << "\" cy=\"" << sy(ber)
           << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      } else {
        // zero BER sits on the floor with an open downward marker
        const double x = sx(snr), y = sy(0.0);
        os << "<path d=\"M " << (x - 4) << ' ' << (y - 4) << " L " << (x + 4)
           << ' ' << (y - 4) << " L " << x << ' ' << (y + 3)
           << " Z\" fill=\"white\" stroke=\"" << color << "\"/>\n";
      }
    }
    const double lx = ml + pw + 14, ly = mt + 10 + 20.0 * ci;
    os << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << (lx + 26)
       << "\" y2=\"" << ly << "\" stroke=\"" << color
       << "\" stroke-width=\"1.6\"/>\n";
    os << "<text x=\"" << (lx + 32) << "\" y=\"" << (ly + 4)
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << name
       << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
}

}  // namespace abc
