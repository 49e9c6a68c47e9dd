#include "woodleaf/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "woodleaf/error.hpp"
#include "woodleaf/num_format.hpp"

namespace woodleaf {

namespace {

std::string loc(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path.string());
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::vector<std::string_view> split_char(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

double parse_coord(std::string_view token, const std::filesystem::path& path, std::size_t line) {
    double v = 0.0;
    if (!try_parse_double(token, v))
        throw ParseError("malformed numeric field '" + std::string(token) + "' at " +
                         loc(path, line));
    if (!std::isfinite(v))
        throw ParseError("non-finite coordinate at " + loc(path, line));
    return v;
}

Label parse_label_value(long long v, const std::filesystem::path& path, std::size_t line) {
    if (v == 0) return Label::Wood;
    if (v == 1) return Label::Leaf;
    throw ParseError("invalid label value '" + std::to_string(v) + "' at " + loc(path, line) +
                     " (expected 0 or 1)");
}

bool is_float_type(std::string_view t) {
    return t == "float" || t == "float32" || t == "double" || t == "float64";
}

bool is_int_type(std::string_view t) {
    return t == "char" || t == "int8" || t == "uchar" || t == "uint8" || t == "short" ||
           t == "int16" || t == "ushort" || t == "uint16" || t == "int" || t == "int32" ||
           t == "uint" || t == "uint32";
}

} // namespace

PointCloud read_xyz(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    PointCloud cloud;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto tokens = split_ws(body);
        if (tokens.size() < 3)
            throw ParseError("expected at least 3 columns at " + loc(path, line_no));
        Point3 p{parse_coord(tokens[0], path, line_no), parse_coord(tokens[1], path, line_no),
                 parse_coord(tokens[2], path, line_no)};
        cloud.points.push_back(p);
    }
    if (cloud.empty()) throw ParseError("empty input: no data lines in " + path.string());
    return cloud;
}

void write_xyz(const PointCloud& cloud, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    for (const Point3& p : cloud.points)
        out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z)
            << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

PlyContents read_ply(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_no = 0;

    auto next_line = [&](bool required) -> bool {
        if (!std::getline(in, line)) {
            if (required) throw ParseError("unexpected end of header in " + path.string());
            return false;
        }
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    next_line(true);
    if (trim(line) != "ply") throw ParseError("not a PLY file: " + path.string());

    bool saw_format = false;
    std::size_t vertex_count = 0;
    bool in_vertex_element = false;
    bool saw_vertex_element = false;
    std::vector<std::string> vertex_props;

    for (;;) {
        next_line(true);
        const auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        const std::string_view kw = tokens[0];
        if (kw == "end_header") break;
        if (kw == "comment" || kw == "obj_info") continue;
        if (kw == "format") {
            if (tokens.size() < 2) throw ParseError("malformed format line at " + loc(path, line_no));
            if (tokens[1] != "ascii")
                throw IoError("unsupported format '" + std::string(tokens[1]) + "' in " +
                              path.string() + " (only ascii 1.0 is supported)");
            saw_format = true;
            continue;
        }
        if (kw == "element") {
            if (tokens.size() < 3) throw ParseError("malformed element line at " + loc(path, line_no));
            long long count = 0;
            if (!try_parse_int(tokens[2], count) || count < 0)
                throw ParseError("bad element count at " + loc(path, line_no));
            if (tokens[1] == "vertex") {
                saw_vertex_element = true;
                in_vertex_element = true;
                vertex_count = static_cast<std::size_t>(count);
            } else {
                in_vertex_element = false;
                if (count > 0)
                    throw IoError("unsupported element '" + std::string(tokens[1]) + "' in " +
                                  path.string());
            }
            continue;
        }
        if (kw == "property") {
            if (!in_vertex_element) continue;
            if (tokens.size() >= 2 && tokens[1] == "list")
                throw IoError("unsupported list property in " + path.string());
            if (tokens.size() < 3) throw ParseError("malformed property line at " + loc(path, line_no));
            const std::string_view type = tokens[1];
            const std::string_view name = tokens[2];
            if ((name == "x" || name == "y" || name == "z") && !is_float_type(type))
                throw ParseError("property '" + std::string(name) + "' must be float-typed at " +
                                 loc(path, line_no));
            if (name == "label" && !is_int_type(type))
                throw ParseError("property 'label' must be integer-typed at " + loc(path, line_no));
            vertex_props.emplace_back(name);
            continue;
        }
        throw ParseError("unrecognized header keyword '" + std::string(kw) + "' at " +
                         loc(path, line_no));
    }

    if (!saw_format) throw ParseError("missing format line in " + path.string());
    if (!saw_vertex_element) throw ParseError("missing vertex element in " + path.string());

    const auto find_prop = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < vertex_props.size(); ++i)
            if (vertex_props[i] == name) return i;
        return std::nullopt;
    };
    const auto ix = find_prop("x"), iy = find_prop("y"), iz = find_prop("z");
    if (!ix || !iy || !iz)
        throw ParseError("vertex element must carry x, y and z properties in " + path.string());
    const auto ilabel = find_prop("label");

    PlyContents out;
    out.cloud.points.reserve(vertex_count);
    if (ilabel) {
        out.labels.emplace();
        out.labels->reserve(vertex_count);
    }

    for (std::size_t v = 0; v < vertex_count; ++v) {
        if (!next_line(false))
            throw ParseError("vertex count mismatch in " + path.string() + ": expected " +
                             std::to_string(vertex_count) + " vertices, got " + std::to_string(v));
        const auto tokens = split_ws(line);
        if (tokens.size() < vertex_props.size())
            throw ParseError("too few columns at " + loc(path, line_no));
        Point3 p{parse_coord(tokens[*ix], path, line_no), parse_coord(tokens[*iy], path, line_no),
                 parse_coord(tokens[*iz], path, line_no)};
        out.cloud.points.push_back(p);
        if (ilabel) {
            long long lv = 0;
            if (!try_parse_int(tokens[*ilabel], lv))
                throw ParseError("malformed label at " + loc(path, line_no));
            out.labels->push_back(parse_label_value(lv, path, line_no));
        }
    }
    if (vertex_count == 0) throw ParseError("empty input: zero vertices in " + path.string());
    return out;
}

void write_classified_ply(const PointCloud& cloud, const LabelVector& labels,
                          const std::filesystem::path& path) {
    if (labels.size() != cloud.size())
        throw ConfigError("label vector length does not match cloud size");
    std::ofstream out = open_output(path);
    out << "ply\n"
        << "format ascii 1.0\n"
        << "comment generated by woodleaf\n"
        << "element vertex " << cloud.size() << "\n"
        << "property double x\n"
        << "property double y\n"
        << "property double z\n"
        << "property uchar red\n"
        << "property uchar green\n"
        << "property uchar blue\n"
        << "property uchar label\n"
        << "end_header\n";
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Point3& p = cloud[i];
        const bool leaf = labels[i] == Label::Leaf;
        out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z)
            << (leaf ? " 0 200 0 1" : " 139 69 19 0") << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

LabelVector read_labels(const std::filesystem::path& path, std::optional<std::size_t> expected_n) {
    std::ifstream in = open_input(path);
    LabelVector labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = trim(line);
        if (body.empty()) continue;
        long long v = 0;
        if (!try_parse_int(body, v))
            throw ParseError("malformed label '" + std::string(body) + "' at " + loc(path, line_no));
        labels.push_back(parse_label_value(v, path, line_no));
    }
    if (expected_n && labels.size() != *expected_n)
        throw ParseError("label count mismatch in " + path.string() + ": expected " +
                         std::to_string(*expected_n) + ", got " + std::to_string(labels.size()));
    return labels;
}

void write_labels(const LabelVector& labels, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    for (Label l : labels) out << label_to_int(l) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

void write_feature_csv(const std::vector<FeatureVector>& features,
                       const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << "x,y,z,c_lambda,rho\n";
    for (const FeatureVector& f : features)
        out << format_double(f.x) << ',' << format_double(f.y) << ',' << format_double(f.z) << ','
            << format_double(f.c_lambda) << ',' << format_double(f.rho) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<FeatureVector> read_feature_csv(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty feature CSV: " + path.string());
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line) != "x,y,z,c_lambda,rho")
        throw ParseError("unexpected feature CSV header in " + path.string());

    std::vector<FeatureVector> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto cols = split_char(line, ',');
        if (cols.size() != 5)
            throw ParseError("expected 5 columns at " + loc(path, line_no));
        FeatureVector f;
        double* fields[5] = {&f.x, &f.y, &f.z, &f.c_lambda, &f.rho};
        for (int c = 0; c < 5; ++c)
            if (!try_parse_double(trim(cols[c]), *fields[c]))
                throw ParseError("malformed numeric field at " + loc(path, line_no));
        out.push_back(f);
    }
    if (out.empty()) throw ParseError("empty input: no feature rows in " + path.string());
    return out;
}

void write_samples_csv(const std::vector<SampleRow>& rows, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << "point_index,sigma,class\n";
    for (const SampleRow& r : rows)
        out << r.point_index << ',' << format_double(r.sigma) << ',' << label_to_int(r.label)
            << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<SampleRow> read_samples_csv(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty samples CSV: " + path.string());
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line) != "point_index,sigma,class")
        throw ParseError("unexpected samples CSV header in " + path.string());

    std::vector<SampleRow> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto cols = split_char(line, ',');
        if (cols.size() != 3) throw ParseError("expected 3 columns at " + loc(path, line_no));
        SampleRow row;
        long long idx = 0;
        if (!try_parse_int(trim(cols[0]), idx) || idx < 0)
            throw ParseError("malformed point index at " + loc(path, line_no));
        row.point_index = static_cast<std::size_t>(idx);
        if (!try_parse_double(trim(cols[1]), row.sigma))
            throw ParseError("malformed sigma at " + loc(path, line_no));
        long long lv = 0;
        if (!try_parse_int(trim(cols[2]), lv))
            throw ParseError("malformed class at " + loc(path, line_no));
        row.label = parse_label_value(lv, path, line_no);
        out.push_back(row);
    }
    if (out.empty()) throw ParseError("empty input: no sample rows in " + path.string());
    return out;
}

PointCloud cloud_from_features(const std::vector<FeatureVector>& features) {
    PointCloud cloud;
    cloud.points.reserve(features.size());
    for (const FeatureVector& f : features) cloud.points.push_back({f.x, f.y, f.z});
    return cloud;
}

PlyContents read_cloud_any(const std::filesystem::path& path) {
    if (path.extension() == ".ply") return read_ply(path);
    return {read_xyz(path), std::nullopt};
}

} // namespace woodleaf
