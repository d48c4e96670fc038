#include "frostlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace frostlab {

std::string fmt_double(double v) {
    char buf[40];
    // Try shortest-first so common values stay readable; fall back to 17
    // significant digits, which always round-trips.
    for (int prec : {15, 16, 17}) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return buf;
}

std::string fmt_point(const Point2& p) { return fmt_double(p.x) + " " + fmt_double(p.y); }

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

namespace {

// Strip comments/blank lines; returns (stripped line, raw comment text).
bool next_data_line(std::istream& in, std::string& line, std::string* comment = nullptr) {
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            if (comment) *comment = line.substr(hash + 1);
            line = line.substr(0, hash);
        } else if (comment) {
            comment->clear();
        }
        auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) {
            if (comment && !comment->empty()) { line.clear(); return true; }
            continue;
        }
        auto end = line.find_last_not_of(" \t\r");
        line = line.substr(begin, end - begin + 1);
        return true;
    }
    return false;
}

}  // namespace

void save_points(const std::string& path, const PointSet& ps) {
    std::ostringstream out;
    out << "# scale_exp=" << ps.scale().exponent << "\n";
    for (const Point2& p : ps.points()) out << fmt_point(p) << "\n";
    write_text_file(path, out.str());
}

PointSet load_points(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line, comment;
    std::vector<Point2> pts;
    int scale_exp = -1;
    while (next_data_line(in, line, &comment)) {
        if (!comment.empty()) {
            const auto pos = comment.find("scale_exp=");
            if (pos != std::string::npos) scale_exp = std::stoi(comment.substr(pos + 10));
        }
        if (line.empty()) continue;
        std::istringstream ls(line);
        Point2 p;
        if (!(ls >> p.x >> p.y)) throw std::runtime_error("malformed point line: " + line);
        pts.push_back(p);
    }
    if (scale_exp < 0) throw std::runtime_error("point file missing scale_exp header: " + path);
    return PointSet(std::move(pts), Scale(scale_exp));
}

namespace {

Tube parse_tube_line(const std::string& line) {
    std::istringstream ls(line);
    double theta, offset, width;
    if (!(ls >> theta >> offset >> width))
        throw std::runtime_error("malformed tube line: " + line);
    return Tube(Line(theta, offset), width);
}

std::string tube_line(const Tube& t) {
    return fmt_double(t.axis.theta) + " " + fmt_double(t.axis.offset) + " " +
           fmt_double(t.width);
}

}  // namespace

void save_tubes(const std::string& path, const std::vector<Tube>& tubes) {
    std::ostringstream out;
    for (const Tube& t : tubes) out << tube_line(t) << "\n";
    write_text_file(path, out.str());
}

std::vector<Tube> load_tubes(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    std::vector<Tube> tubes;
    while (next_data_line(in, line))
        if (!line.empty()) tubes.push_back(parse_tube_line(line));
    return tubes;
}

void save_anchored_tubes(const std::string& path, const std::vector<AnchoredTubes>& fams) {
    std::ostringstream out;
    for (const AnchoredTubes& fam : fams) {
        out << "# anchor " << fmt_point(fam.anchor) << "\n";
        for (const Tube& t : fam.tubes) out << tube_line(t) << "\n";
    }
    write_text_file(path, out.str());
}

std::vector<AnchoredTubes> load_anchored_tubes(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line, comment;
    std::vector<AnchoredTubes> fams;
    while (next_data_line(in, line, &comment)) {
        if (!comment.empty()) {
            std::istringstream cs(comment);
            std::string word;
            cs >> word;
            if (word == "anchor") {
                AnchoredTubes fam;
                if (!(cs >> fam.anchor.x >> fam.anchor.y))
                    throw std::runtime_error("malformed anchor line");
                fams.push_back(std::move(fam));
            }
        }
        if (line.empty()) continue;
        if (fams.empty()) throw std::runtime_error("tube line before any anchor: " + line);
        fams.back().tubes.push_back(parse_tube_line(line));
    }
    return fams;
}

void KeyValueBlock::add(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}
void KeyValueBlock::add(const std::string& key, double value) { add(key, fmt_double(value)); }
void KeyValueBlock::add(const std::string& key, std::int64_t value) {
    add(key, std::to_string(value));
}
void KeyValueBlock::add(const std::string& key, std::uint64_t value) {
    add(key, std::to_string(value));
}
void KeyValueBlock::add(const std::string& key, int value) { add(key, std::to_string(value)); }
void KeyValueBlock::add(const std::string& key, bool value) {
    add(key, std::string(value ? "true" : "false"));
}

std::string KeyValueBlock::to_string() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
    return out;
}

void KeyValueBlock::save(const std::string& path) const { write_text_file(path, to_string()); }

std::map<std::string, std::string> parse_key_value(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    while (next_data_line(in, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("malformed key=value line: " + line);
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += header[i];
    }
    buf_ += '\n';
}

void CsvWriter::comment(const std::string& line) {
    // Comments go before the header so downstream CSV readers can skip them.
    buf_.insert(0, "# " + line + "\n");
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += cells[i];
    }
    buf_ += '\n';
}

void CsvWriter::save(const std::string& path) const { write_text_file(path, buf_); }

}  // namespace frostlab
