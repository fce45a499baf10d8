#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace perieig {

/// Rows of already formatted cells under a header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<double> values);
};

/// 12 significant digits, locale independent.
std::string format_number(double v);

std::string to_csv(const CsvTable& t);
/// Refuses empty tables; creates parent directories.
void write_csv(const std::string& path, const CsvTable& t);

struct Polyline {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (rho, omega)
};

/// lambda on a (rho, omega) grid; values[io * rho.size() + ir].
struct PlaneField {
    std::vector<double> rho, omega, values;
};

/// Self-contained SVG of the rho-omega plane with log axes: optional heat map,
/// contour lines of the field at `levels`, and extra polylines.
std::string plane_svg(const std::string& title, const PlaneField* field, const std::vector<double>& levels,
                      const std::vector<Polyline>& curves);

/// Marching-squares segments of one contour level in log coordinates, joined
/// into polylines in (rho, omega).
std::vector<Polyline> contour_lines(const PlaneField& field, double level);

void write_text(const std::string& path, const std::string& text);

/// Run record: config hash, version and per-operation status and timing.
class RunRecord {
public:
    RunRecord(std::string config_hash, std::string version);
    void add(const std::string& operation, const std::string& status, double seconds, nlohmann::json results);
    const nlohmann::json& json() const { return doc_; }
    std::string dump() const { return doc_.dump(2); }

private:
    nlohmann::json doc_;
};

inline constexpr const char* kVersion = "1.0.0";

}  // namespace perieig
