#include "hetero/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace hetero {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    if (!v.empty() && *first == '+') ++first;
    const auto r = std::from_chars(first, last, out);
    if (r.ec != std::errc() || r.ptr != last) throw ConfigError("key '" + key + "': not a number: '" + v + "'");
    return out;
}

} // namespace

Config Config::parse(const std::string& text)
{
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (c.has(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        c.kv_[key] = trim(line.substr(eq + 1));
    }
    return c;
}

Config Config::load(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

void Config::set(const std::string& key, const std::string& value) { kv_[key] = value; }

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get(const std::string& key, const std::string& fallback) const
{
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const
{
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : to_double(key, it->second);
}

int Config::get_int(const std::string& key, int fallback) const
{
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    int out = 0;
    const std::string& v = it->second;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
    return out;
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const
{
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

std::vector<std::string> Config::keys() const
{
    std::vector<std::string> out;
    for (const auto& [k, v] : kv_) out.push_back(k);
    return out;
}

void Config::check_known(const std::vector<std::string>& allowed) const
{
    for (const auto& [k, v] : kv_)
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw ConfigError("unknown key '" + k + "'");
}

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

std::string csv_escape(const std::string& field)
{
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), columns_(header.size())
{
    for (const auto& h : header) *this << h;
    end_row();
}

void CsvWriter::sep()
{
    if (col_ == columns_) throw std::logic_error("csv row has too many fields");
    if (col_ > 0) os_ << ',';
    ++col_;
}

CsvWriter& CsvWriter::operator<<(double v)
{
    sep();
    os_ << format_number(v);
    return *this;
}

CsvWriter& CsvWriter::operator<<(int v)
{
    sep();
    os_ << v;
    return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& v)
{
    sep();
    os_ << csv_escape(v);
    return *this;
}

CsvWriter& CsvWriter::operator<<(const char* v) { return *this << std::string(v); }

void CsvWriter::end_row()
{
    if (col_ != columns_) throw std::logic_error("csv row has too few fields");
    os_ << "\r\n";
    col_ = 0;
}

namespace {

std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string px(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

std::string render_svg(const Plot& plot, int width, int height)
{
    const double left = 84, right = 150, top = 36, bottom = 50;
    const double pw = width - left - right, ph = height - top - bottom;
    auto ty = [&](double y) { return plot.log_y ? (y > 0 ? std::log10(y) : std::numeric_limits<double>::quiet_NaN()) : y; };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : plot.series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            const double y = ty(s.y[i]);
            if (!std::isfinite(s.x[i]) || !std::isfinite(y)) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 <= 0) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 <= 0) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.04 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto X = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto Y = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << px(left + pw / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(plot.title) << "</text>\n";
    o << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(pw) << "\" height=\"" << px(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
        char xl[32], yl[32];
        std::snprintf(xl, sizeof xl, "%.4g", xv);
        std::snprintf(yl, sizeof yl, plot.log_y ? "1e%.3g" : "%.4g", yv);
        o << "<text x=\"" << px(X(xv)) << "\" y=\"" << px(top + ph + 16) << "\" text-anchor=\"middle\">" << xl
          << "</text>\n";
        o << "<text x=\"" << px(left - 6) << "\" y=\"" << px(Y(yv) + 4) << "\" text-anchor=\"end\">" << yl
          << "</text>\n";
    }
    o << "<text x=\"" << px(left + pw / 2) << "\" y=\"" << px(height - 10.0) << "\" text-anchor=\"middle\">"
      << xml_escape(plot.x_label) << "</text>\n";
    o << "<text x=\"14\" y=\"" << px(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << px(top + ph / 2) << ")\">" << xml_escape(plot.y_label) << "</text>\n";

    int legend = 0;
    for (const auto& s : plot.series) {
        const std::size_t n = std::min(s.x.size(), s.y.size());
        if (s.points) {
            o << "<g fill=\"" << s.colour << "\">\n";
            for (std::size_t i = 0; i < n; ++i) {
                const double y = ty(s.y[i]);
                if (!std::isfinite(s.x[i]) || !std::isfinite(y)) continue;
                o << "<circle cx=\"" << px(X(s.x[i])) << "\" cy=\"" << px(Y(y)) << "\" r=\"2\"/>\n";
            }
            o << "</g>\n";
        } else {
            std::string d;
            bool pen = false;
            for (std::size_t i = 0; i < n; ++i) {
                const double y = ty(s.y[i]);
                if (!std::isfinite(s.x[i]) || !std::isfinite(y)) {
                    pen = false;
                    continue;
                }
                d += (pen ? " L" : " M") + px(X(s.x[i])) + ' ' + px(Y(y));
                pen = true;
            }
            if (!d.empty())
                o << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.2\"/>\n";
        }
        if (!s.label.empty()) {
            const double ly = top + 14 + 18 * legend++;
            o << "<rect x=\"" << px(left + pw + 12) << "\" y=\"" << px(ly - 8) << "\" width=\"12\" height=\"8\" fill=\""
              << s.colour << "\"/>\n";
            o << "<text x=\"" << px(left + pw + 30) << "\" y=\"" << px(ly) << "\">" << xml_escape(s.label)
              << "</text>\n";
        }
    }
    o << "</svg>\n";
    return o.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed for " + path);
}

} // namespace hetero
