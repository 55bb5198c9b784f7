#pragma once

#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetero {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Flat key=value text; '#' starts a comment, blank lines are ignored.
class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::string> keys() const;

    // Throws ConfigError naming the first key not in the list.
    void check_known(const std::vector<std::string>& allowed) const;

private:
    std::map<std::string, std::string> kv_;
};

// 17 significant digits, '.' decimal point regardless of locale.
std::string format_number(double v);

class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header);

    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(int v);
    CsvWriter& operator<<(const std::string& v);
    CsvWriter& operator<<(const char* v);
    void end_row();

private:
    void sep();
    std::ostream& os_;
    std::size_t columns_;
    std::size_t col_ = 0;
};

std::string csv_escape(const std::string& field);

struct PlotSeries {
    std::string label;
    std::string colour = "#1f77b4";
    std::vector<double> x;
    std::vector<double> y;
    bool points = false;  // markers instead of a polyline; NaN breaks a polyline
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    std::vector<PlotSeries> series;
};

// Self-contained SVG document.
std::string render_svg(const Plot& plot, int width = 720, int height = 480);

// Writes text to a file, throwing std::runtime_error on failure.
void write_file(const std::string& path, const std::string& text);

} // namespace hetero
