#include "atroscreen/analysis.hpp"
#include "atroscreen/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace atroscreen {

std::string to_string(SeverityBand band) {
    switch (band) {
        case SeverityBand::WithinRange: return "WithinRange";
        case SeverityBand::Borderline: return "Borderline";
        case SeverityBand::Elevated: return "Elevated";
        case SeverityBand::Severe: return "Severe";
    }
    return "WithinRange";
}

MetricSet compute_metrics(const PixelCounts& counts, const SizeComparison& size_cmp) {
    if (counts.roi_area <= 0) throw ArgumentError("roi_area must be positive");
    MetricSet m;
    m.black_count = counts.black_count;
    m.white_count = counts.white_count;
    m.roi_area = counts.roi_area;
    m.cavity_ratio = static_cast<double>(counts.black_count) /
                     static_cast<double>(counts.roi_area);
    m.area_ratio = size_cmp.area_ratio;
    return m;
}

double z_score(double value, const NormativeBaseline& baseline) {
    if (!(baseline.sd > 0.0)) throw ArgumentError("baseline sd must be positive");
    return (value - baseline.mean) / baseline.sd;
}

NormativeBaseline fit_baseline(const std::vector<double>& samples,
                               double age_min, double age_max,
                               const std::string& metric) {
    if (samples.size() < 2) {
        throw DataError("degenerate baseline: need at least 2 samples, got " +
                        std::to_string(samples.size()));
    }
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(samples.size());
    double ss = 0.0;
    for (double s : samples) ss += (s - mean) * (s - mean);
    const double var = ss / static_cast<double>(samples.size() - 1);
    if (!(var > 0.0)) {
        throw DataError("degenerate baseline: samples have zero variance");
    }

    NormativeBaseline b;
    b.age_min = age_min;
    b.age_max = age_max;
    b.metric = metric;
    b.mean = mean;
    b.sd = std::sqrt(var);
    b.n = static_cast<int>(samples.size());
    return b;
}

SeverityBand classify_severity(double z) {
    if (!std::isfinite(z)) throw ArgumentError("z-score must be finite");
    if (z >= 3.0) return SeverityBand::Severe;
    if (z >= 2.0) return SeverityBand::Elevated;
    if (z >= 1.0) return SeverityBand::Borderline;
    return SeverityBand::WithinRange;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) fields.push_back(field);
    return fields;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

} // namespace

std::vector<NormativeBaseline> parse_baseline_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("baseline CSV: empty file");

    const std::string expected = "age_min,age_max,metric,mean,sd,n";
    std::string header = trim(line);
    if (header != expected) {
        throw ParseError("baseline CSV: header must be \"" + expected + "\", got \"" +
                         header + "\"");
    }

    std::vector<NormativeBaseline> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const auto fields = split_csv_line(trimmed);
        if (fields.size() != 6) {
            throw ParseError("baseline CSV line " + std::to_string(line_no) +
                             ": expected 6 fields, got " + std::to_string(fields.size()));
        }
        const std::string where = "baseline CSV line " + std::to_string(line_no) + ": ";
        try {
            NormativeBaseline b;
            b.age_min = std::stod(fields[0]);
            b.age_max = std::stod(fields[1]);
            b.metric = trim(fields[2]);
            b.mean = std::stod(fields[3]);
            b.sd = std::stod(fields[4]);
            b.n = std::stoi(fields[5]);
            if (!(b.sd > 0.0)) throw ParseError(where + "sd must be > 0");
            if (b.n < 2) throw ParseError(where + "n must be >= 2");
            if (b.age_min > b.age_max) throw ParseError(where + "age_min must be <= age_max");
            rows.push_back(std::move(b));
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(where + e.what());
        }
    }
    return rows;
}

std::vector<NormativeBaseline> load_baseline_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open baseline file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_baseline_csv(text);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

NormativeBaseline select_baseline(const std::vector<NormativeBaseline>& rows,
                                  double age, const std::string& metric) {
    for (const auto& row : rows) {
        if (row.metric == metric && age >= row.age_min && age <= row.age_max) {
            return row;
        }
    }
    std::ostringstream os;
    os << "no baseline row matches metric \"" << metric << "\" at age " << age;
    throw DataError(os.str());
}

} // namespace atroscreen
