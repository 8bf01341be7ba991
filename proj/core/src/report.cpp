#include "vsb/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "vsb/error.hpp"
#include "vsb/version.hpp"

namespace vsb {

using nlohmann::json;

namespace {

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write file: " + path);
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

json metric_vector_json(const MetricVector& v, double mixr_value) {
    json j;
    j["r1"] = v.r1;
    j["r5"] = v.r5;
    j["r10"] = v.r10;
    j["medr"] = v.med_r;
    j["meanr"] = v.mean_r;
    j["mixr"] = mixr_value;
    return j;
}

MetricVector metric_vector_from_json(const json& j) {
    MetricVector v;
    v.r1 = j.at("r1").get<double>();
    v.r5 = j.at("r5").get<double>();
    v.r10 = j.at("r10").get<double>();
    v.med_r = j.at("medr").get<double>();
    v.mean_r = j.at("meanr").get<double>();
    return v;
}

} // namespace

void write_bundles_csv(const std::vector<std::pair<std::string, MetricBundle>>& bundles,
                       const std::string& path) {
    auto out = open_output(path);
    out << "corpus,r_at_1,r_at_5,r_at_10,med_r,mean_r\n";
    for (const auto& [label, b] : bundles) {
        out << label << ',' << fmt(b.r1) << ',' << fmt(b.r5) << ',' << fmt(b.r10) << ','
            << fmt(b.med_r) << ',' << fmt(b.mean_r) << '\n';
    }
}

void write_delta_csv(const DeltaReport& report, const std::string& path) {
    auto out = open_output(path);
    out << "metric,relative,location,normalized\n";
    auto row = [&](const char* name, double r, double l, double n) {
        out << name << ',' << fmt(r) << ',' << fmt(l) << ',' << fmt(n) << '\n';
    };
    row("r1", report.relative.r1, report.location.r1, report.normalized.r1);
    row("r5", report.relative.r5, report.location.r5, report.normalized.r5);
    row("r10", report.relative.r10, report.location.r10, report.normalized.r10);
    row("medr", report.relative.med_r, report.location.med_r, report.normalized.med_r);
    row("meanr", report.relative.mean_r, report.location.mean_r, report.normalized.mean_r);
    row("mixr", report.mixr_relative, report.mixr_location, report.mixr_normalized);
}

void write_delta_json(const DeltaReport& report, const std::string& path) {
    json j;
    j["relative"] = metric_vector_json(report.relative, report.mixr_relative);
    j["location"] = metric_vector_json(report.location, report.mixr_location);
    j["normalized"] = metric_vector_json(report.normalized, report.mixr_normalized);
    j["mixr"] = {{"relative", report.mixr_relative},
                 {"location", report.mixr_location},
                 {"normalized", report.mixr_normalized}};
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

DeltaReport load_delta_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open file: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("parse error in " + path + ": " + e.what());
    }
    DeltaReport report;
    report.relative = metric_vector_from_json(j.at("relative"));
    report.location = metric_vector_from_json(j.at("location"));
    report.normalized = metric_vector_from_json(j.at("normalized"));
    report.mixr_relative = j.at("mixr").at("relative").get<double>();
    report.mixr_location = j.at("mixr").at("location").get<double>();
    report.mixr_normalized = j.at("mixr").at("normalized").get<double>();
    return report;
}

namespace {

struct BarGroup {
    std::string name;
    double relative;
    double location;
    double normalized;
};

} // namespace

void write_delta_svg(const DeltaReport& report, const std::string& path) {
    const std::vector<BarGroup> groups = {
        {"R@1", report.relative.r1, report.location.r1, report.normalized.r1},
        {"R@5", report.relative.r5, report.location.r5, report.normalized.r5},
        {"R@10", report.relative.r10, report.location.r10, report.normalized.r10},
        {"MedR", report.relative.med_r, report.location.med_r, report.normalized.med_r},
        {"MeanR", report.relative.mean_r, report.location.mean_r, report.normalized.mean_r},
        {"MixR", report.mixr_relative, report.mixr_location, report.mixr_normalized},
    };

    double max_abs = 10.0;
    for (const auto& g : groups) {
        max_abs = std::max({max_abs, std::abs(g.relative), std::abs(g.location),
                            std::abs(g.normalized)});
    }

    const double width = 720.0;
    const double height = 360.0;
    const double margin = 40.0;
    const double zero_y = height / 2.0;
    const double scale = (height / 2.0 - margin) / max_abs;
    const double group_w = (width - 2.0 * margin) / static_cast<double>(groups.size());
    const double bar_w = group_w / 4.0;
    const char* colors[3] = {"#4878cf", "#ee854a", "#6acc64"};

    auto out = open_output(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "  <line x1=\"" << margin << "\" y1=\"" << zero_y << "\" x2=\"" << width - margin
        << "\" y2=\"" << zero_y << "\" stroke=\"#555\"/>\n";
    for (size_t g = 0; g < groups.size(); ++g) {
        const double x0 = margin + group_w * static_cast<double>(g);
        const double values[3] = {groups[g].relative, groups[g].location,
                                  groups[g].normalized};
        for (int k = 0; k < 3; ++k) {
            const double v = values[k];
            const double h = std::abs(v) * scale;
            const double y = v >= 0.0 ? zero_y - h : zero_y;
            char buf[256];
            std::snprintf(buf, sizeof(buf),
                          "  <rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                          "fill=\"%s\"><title>%s %s=%.2f</title></rect>\n",
                          x0 + bar_w * (0.5 + k), y, bar_w * 0.9, h, colors[k],
                          groups[g].name.c_str(),
                          k == 0 ? "relative" : (k == 1 ? "location" : "normalized"), v);
            out << buf;
        }
        char label[128];
        std::snprintf(label, sizeof(label),
                      "  <text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" "
                      "text-anchor=\"middle\">%s</text>\n",
                      x0 + group_w / 2.0, height - 10.0, groups[g].name.c_str());
        out << label;
    }
    out << "  <text x=\"" << margin << "\" y=\"16\" font-size=\"12\">"
        << "relative (blue) / location (orange) / normalized (green), +/-" << fmt(max_abs)
        << "</text>\n";
    out << "</svg>\n";
}

void write_scatter_svg(const Projection2D& projection, const std::string& path) {
    const double width = 560.0;
    const double height = 560.0;
    const double margin = 40.0;

    double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
    for (const auto& p : projection.points) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double span_x = std::max(max_x - min_x, 1e-12);
    const double span_y = std::max(max_y - min_y, 1e-12);

    std::vector<std::string> labels;
    for (const auto& p : projection.points) {
        if (std::find(labels.begin(), labels.end(), p.label) == labels.end()) {
            labels.push_back(p.label);
        }
    }
    const char* palette[6] = {"#4878cf", "#ee854a", "#6acc64", "#d65f5f", "#956cb4", "#8c613c"};

    auto out = open_output(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    for (const auto& p : projection.points) {
        const double px = margin + (p.x - min_x) / span_x * (width - 2.0 * margin);
        const double py = height - margin - (p.y - min_y) / span_y * (height - 2.0 * margin);
        const size_t li =
            std::find(labels.begin(), labels.end(), p.label) - labels.begin();
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "  <circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\" "
                      "fill-opacity=\"0.7\"><title>%s</title></circle>\n",
                      px, py, palette[li % 6], p.id.c_str());
        out << buf;
    }
    for (size_t li = 0; li < labels.size(); ++li) {
        char buf[192];
        std::snprintf(buf, sizeof(buf),
                      "  <text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" fill=\"%s\">%s</text>\n",
                      margin, 16.0 + 14.0 * static_cast<double>(li), palette[li % 6],
                      labels[li].c_str());
        out << buf;
    }
    out << "</svg>\n";
}

void write_ttest_json(const TTestResult& result, const std::string& path) {
    json j;
    j["t_statistic"] = result.t_statistic;
    j["degrees_of_freedom"] = result.degrees_of_freedom;
    j["p_value"] = result.p_value;
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

void write_flow_summary_json(const FlowEntropySummary& summary, const std::string& path) {
    json j;
    j["mean_entropy_real"] = summary.mean_entropy_real;
    j["mean_entropy_ai"] = summary.mean_entropy_ai;
    j["higher_count_real"] = summary.higher_count_real;
    j["higher_count_ai"] = summary.higher_count_ai;
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

void write_flow_summary_csv(const FlowEntropySummary& summary, const std::string& path) {
    auto out = open_output(path);
    out << "mean_entropy_real,mean_entropy_ai,higher_count_real,higher_count_ai\n";
    out << fmt(summary.mean_entropy_real) << ',' << fmt(summary.mean_entropy_ai) << ','
        << summary.higher_count_real << ',' << summary.higher_count_ai << '\n';
}

void write_manifest(const std::string& command,
                    const std::map<std::string, std::string>& config,
                    uint64_t seed,
                    const std::string& path) {
    json j;
    j["command"] = command;
    j["seed"] = seed;
    j["version"] = kVersion;
    j["config"] = config;
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

} // namespace vsb
