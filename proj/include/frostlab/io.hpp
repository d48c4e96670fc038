#pragma once

// File formats shared by the CLI and the experiment drivers.
//
//   point file:  "# scale_exp=m" header, then one "x y" pair per line
//   tube file:   one "theta offset width" triple per line; an optional
//                "# anchor x y" line starts a new anchored section
//   reports:     flat "key=value" blocks; tables as CSV with a fixed header
//
// '#' starts a comment anywhere; numbers are written with enough digits to
// round-trip doubles exactly.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "frostlab/geometry.hpp"

namespace frostlab {

// Shortest decimal form that parses back to the same double.
std::string fmt_double(double v);

std::string fmt_point(const Point2& p);

void save_points(const std::string& path, const PointSet& ps);
PointSet load_points(const std::string& path);

struct TubeSet {
    std::vector<Tube> tubes;
};

// An anchored family: tubes grouped under the viewpoint they pass through.
struct AnchoredTubes {
    Point2 anchor;
    std::vector<Tube> tubes;
};

void save_tubes(const std::string& path, const std::vector<Tube>& tubes);
std::vector<Tube> load_tubes(const std::string& path);

void save_anchored_tubes(const std::string& path, const std::vector<AnchoredTubes>& fams);
std::vector<AnchoredTubes> load_anchored_tubes(const std::string& path);

// Ordered key=value block writer; keys appear in insertion order.
class KeyValueBlock {
  public:
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add(const std::string& key, std::int64_t value);
    void add(const std::string& key, std::uint64_t value);
    void add(const std::string& key, int value);
    void add(const std::string& key, bool value);

    std::string to_string() const;
    void save(const std::string& path) const;

  private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

std::map<std::string, std::string> parse_key_value(const std::string& text);

// CSV with a fixed header row; comment lines ("# ...") may precede it.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header);
    void comment(const std::string& line);
    void row(const std::vector<std::string>& cells);
    const std::string& text() const { return buf_; }
    void save(const std::string& path) const;

  private:
    std::size_t width_;
    std::string buf_;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace frostlab
