/*
Copyright 2026 The n2n-lite Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include "n2n/mps.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

namespace n2n {

MpsParseError::MpsParseError(std::size_t line, const std::string &what)
    : std::runtime_error(fmt::format("MPS line {}: {}", line, what)), line_(line) {}

namespace {

constexpr double kMpsInfinity = 1e30;

enum class Section { None, Name, ObjSense, Rows, Columns, Rhs, Ranges, Bounds, EndData };

std::optional<Section> section_of(std::string_view tok) {
    if (tok == "NAME") return Section::Name;
    if (tok == "OBJSENSE" || tok == "OBJSENCE") return Section::ObjSense;
    if (tok == "ROWS") return Section::Rows;
    if (tok == "COLUMNS") return Section::Columns;
    if (tok == "RHS") return Section::Rhs;
    if (tok == "RANGES") return Section::Ranges;
    if (tok == "BOUNDS") return Section::Bounds;
    if (tok == "ENDATA") return Section::EndData;
    return std::nullopt;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        if (i > start)
            out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::string lower_case(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

enum class RowType { L, G, E };

struct PendingRow {
    std::string name;
    RowType type;
    double rhs = 0.0;
    std::optional<double> range;
    std::vector<SparseEntry> entries;
};

struct PendingBounds {
    double lower = 0.0;
    double upper = kInf;
    bool lower_set = false;
};

class Reader {
  public:
    MilpInstance parse(std::string_view text) {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            auto eol = text.find('\n', pos);
            if (eol == std::string_view::npos)
                eol = text.size();
            auto line = text.substr(pos, eol - pos);
            if (!line.empty() && line.back() == '\r')
                line.remove_suffix(1);
            ++line_no_;
            handle_line(line);
            pos = eol + 1;
            if (section_ == Section::EndData)
                break;
        }
        if (section_ != Section::EndData)
            throw MpsParseError(line_no_, "missing ENDATA");
        if (cols_.empty())
            throw MpsParseError(line_no_, "empty COLUMNS section");
        return build();
    }

  private:
    void handle_line(std::string_view line) {
        if (line.empty() || line.front() == '*')
            return;
        auto toks = split(line);
        if (toks.empty())
            return;
        const bool indented = std::isspace(static_cast<unsigned char>(line.front())) != 0;
        if (!indented) {
            auto sec = section_of(toks[0]);
            if (!sec)
                throw MpsParseError(line_no_, fmt::format("unknown section '{}'", toks[0]));
            enter(*sec, toks);
            return;
        }
        switch (section_) {
        case Section::ObjSense: objsense(toks); break;
        case Section::Rows: rows(toks); break;
        case Section::Columns: columns(toks); break;
        case Section::Rhs: rhs_or_range(toks, false); break;
        case Section::Ranges: rhs_or_range(toks, true); break;
        case Section::Bounds: bounds(toks); break;
        default: throw MpsParseError(line_no_, "data line outside of a data section");
        }
    }

    void enter(Section sec, const std::vector<std::string_view> &toks) {
        if (sec == Section::Name && saw_name_)
            throw MpsParseError(line_no_, "duplicate NAME field");
        if (sec <= section_)
            throw MpsParseError(line_no_, fmt::format("section '{}' out of order", toks[0]));
        if (sec > Section::Rows && section_ < Section::Rows)
            throw MpsParseError(line_no_, "ROWS section missing");
        if (sec > Section::Columns && section_ < Section::Columns)
            throw MpsParseError(line_no_, "COLUMNS section missing");
        section_ = sec;
        if (sec == Section::Name) {
            saw_name_ = true;
            if (toks.size() > 1)
                name_ = std::string(toks[1]);
        } else if (sec == Section::ObjSense && toks.size() > 1) {
            objsense({toks.begin() + 1, toks.end()});
        }
    }

    void objsense(const std::vector<std::string_view> &toks) {
        const auto s = lower_case(toks[0]);
        if (s == "max" || s == "maximize")
            throw MpsParseError(line_no_, "maximization is not supported");
        if (s != "min" && s != "minimize")
            throw MpsParseError(line_no_, fmt::format("unknown objective sense '{}'", toks[0]));
    }

    void rows(const std::vector<std::string_view> &toks) {
        if (toks.size() != 2)
            throw MpsParseError(line_no_, "ROWS entries need a type and a name");
        const auto type = lower_case(toks[0]);
        std::string name(toks[1]);
        if (row_index_.contains(name) || name == obj_name_ || dropped_rows_.contains(name))
            throw MpsParseError(line_no_, fmt::format("duplicate row '{}'", name));
        if (type == "n") {
            if (obj_name_.empty())
                obj_name_ = std::move(name);
            else
                dropped_rows_.emplace(std::move(name), 0);
            return;
        }
        RowType rt;
        if (type == "l") rt = RowType::L;
        else if (type == "g") rt = RowType::G;
        else if (type == "e") rt = RowType::E;
        else throw MpsParseError(line_no_, fmt::format("unknown row type '{}'", toks[0]));
        row_index_.emplace(name, rows_.size());
        rows_.push_back(PendingRow{std::move(name), rt, 0.0, std::nullopt, {}});
    }

    void columns(const std::vector<std::string_view> &toks) {
        if (toks.size() >= 3 && (toks[1] == "'MARKER'" || toks[1] == "MARKER")) {
            if (toks[2] == "'INTORG'" || toks[2] == "INTORG")
                in_int_ = true;
            else if (toks[2] == "'INTEND'" || toks[2] == "INTEND")
                in_int_ = false;
            else
                throw MpsParseError(line_no_, fmt::format("unknown marker '{}'", toks[2]));
            return;
        }
        if (toks.size() != 3 && toks.size() != 5)
            throw MpsParseError(line_no_, "COLUMNS entries need a column and row/value pairs");
        std::string cname(toks[0]);
        if (cols_.empty() || cols_.back().name != cname) {
            if (col_index_.contains(cname))
                throw MpsParseError(line_no_, fmt::format("column '{}' is not contiguous", cname));
            col_index_.emplace(cname, cols_.size());
            Column c;
            c.name = std::move(cname);
            c.integral = in_int_;
            cols_.push_back(std::move(c));
            bounds_.emplace_back();
            col_rows_.clear();
        }
        const int j = static_cast<int>(cols_.size() - 1);
        for (std::size_t k = 1; k + 1 < toks.size(); k += 2) {
            const double v = number(toks[k + 1]);
            std::string rname(toks[k]);
            if (rname == obj_name_) {
                if (col_rows_.contains(rname))
                    throw MpsParseError(line_no_, "duplicate objective entry");
                col_rows_.emplace(rname, 0);
                cols_.back().obj = v;
                continue;
            }
            if (dropped_rows_.contains(rname))
                continue;
            auto it = row_index_.find(rname);
            if (it == row_index_.end())
                throw MpsParseError(line_no_, fmt::format("unknown row '{}'", rname));
            if (!col_rows_.emplace(rname, 0).second)
                throw MpsParseError(line_no_, fmt::format("duplicate entry for row '{}'", rname));
            rows_[it->second].entries.push_back({j, v});
        }
    }

    void rhs_or_range(const std::vector<std::string_view> &toks, bool range) {
        // An odd token count carries a leading set name.
        const std::size_t first = toks.size() % 2 == 1 ? 1 : 0;
        if (toks.size() - first < 2 || (toks.size() - first) % 2 != 0)
            throw MpsParseError(line_no_, "expected row/value pairs");
        for (std::size_t k = first; k + 1 < toks.size(); k += 2) {
            std::string rname(toks[k]);
            const double v = number(toks[k + 1]);
            if (rname == obj_name_) {
                if (range)
                    throw MpsParseError(line_no_, "RANGES entry on the objective row");
                offset_ = -v;
                continue;
            }
            if (dropped_rows_.contains(rname))
                continue;
            auto it = row_index_.find(rname);
            if (it == row_index_.end())
                throw MpsParseError(line_no_, fmt::format("unknown row '{}'", rname));
            if (range)
                rows_[it->second].range = v;
            else
                rows_[it->second].rhs = v;
        }
    }

    void bounds(const std::vector<std::string_view> &toks) {
        if (toks.size() < 2)
            throw MpsParseError(line_no_, "BOUNDS entries need a type and a column");
        const auto type = lower_case(toks[0]);
        const bool valued = type == "up" || type == "lo" || type == "fx" || type == "li" || type == "ui";
        const bool valueless = type == "fr" || type == "mi" || type == "pl" || type == "bv";
        if (!valued && !valueless)
            throw MpsParseError(line_no_, fmt::format("unknown bound type '{}'", toks[0]));
        const std::size_t expected = valued ? 3 : 2;
        std::size_t ci;
        if (toks.size() == expected)
            ci = 1;
        else if (toks.size() == expected + 1)
            ci = 2;
        else if (type == "bv" && toks.size() == 4)
            ci = 2; // some writers append a value to BV
        else
            throw MpsParseError(line_no_, "malformed BOUNDS entry");
        auto it = col_index_.find(std::string(toks[ci]));
        if (it == col_index_.end())
            throw MpsParseError(line_no_, fmt::format("unknown column '{}'", toks[ci]));
        auto &b = bounds_[it->second];
        auto &c = cols_[it->second];
        const double v = valued ? number(toks[ci + 1]) : 0.0;
        if (type == "up" || type == "ui") {
            b.upper = v;
            if (v < 0.0 && !b.lower_set && b.lower == 0.0)
                b.lower = -kInf;
            c.integral = c.integral || type == "ui";
        } else if (type == "lo" || type == "li") {
            b.lower = v;
            b.lower_set = true;
            c.integral = c.integral || type == "li";
        } else if (type == "fx") {
            b.lower = b.upper = v;
            b.lower_set = true;
        } else if (type == "fr") {
            b.lower = -kInf;
            b.upper = kInf;
            b.lower_set = true;
        } else if (type == "mi") {
            b.lower = -kInf;
            b.lower_set = true;
        } else if (type == "pl") {
            b.upper = kInf;
        } else { // bv
            b.lower = 0.0;
            b.upper = 1.0;
            b.lower_set = true;
            c.integral = true;
        }
    }

    double number(std::string_view tok) const {
        const auto low = lower_case(tok);
        std::string_view s = low;
        double sign = 1.0;
        if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
            sign = s.front() == '-' ? -1.0 : 1.0;
            s.remove_prefix(1);
        }
        if (s == "inf" || s == "infinity")
            return sign * kInf;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || std::isnan(v))
            throw MpsParseError(line_no_, fmt::format("invalid number '{}'", tok));
        v *= sign;
        if (v >= kMpsInfinity)
            return kInf;
        if (v <= -kMpsInfinity)
            return -kInf;
        return v;
    }

    MilpInstance build() {
        std::vector<Row> rows;
        rows.reserve(rows_.size());
        for (auto &pr : rows_) {
            Row r;
            r.name = std::move(pr.name);
            r.entries = std::move(pr.entries);
            const double b = pr.rhs;
            switch (pr.type) {
            case RowType::L:
                r.lhs = -kInf;
                r.rhs = b;
                if (pr.range)
                    r.lhs = b - std::abs(*pr.range);
                break;
            case RowType::G:
                r.lhs = b;
                r.rhs = kInf;
                if (pr.range)
                    r.rhs = b + std::abs(*pr.range);
                break;
            case RowType::E:
                r.lhs = r.rhs = b;
                if (pr.range && *pr.range > 0.0)
                    r.rhs = b + *pr.range;
                else if (pr.range && *pr.range < 0.0)
                    r.lhs = b + *pr.range;
                break;
            }
            rows.push_back(std::move(r));
        }
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            cols_[j].lower = bounds_[j].lower;
            cols_[j].upper = bounds_[j].upper;
        }
        try {
            return MilpInstance(name_, std::move(cols_), std::move(rows), offset_,
                                obj_name_.empty() ? "obj" : obj_name_);
        } catch (const ModelError &e) {
            throw MpsParseError(line_no_, e.what());
        }
    }

    std::size_t line_no_ = 0;
    Section section_ = Section::None;
    bool saw_name_ = false;
    bool in_int_ = false;
    std::string name_;
    std::string obj_name_;
    double offset_ = 0.0;
    std::vector<PendingRow> rows_;
    std::unordered_map<std::string, std::size_t> row_index_;
    std::unordered_map<std::string, int> dropped_rows_;
    std::vector<Column> cols_;
    std::vector<PendingBounds> bounds_;
    std::unordered_map<std::string, std::size_t> col_index_;
    std::unordered_map<std::string, int> col_rows_;
};

std::string num(double v) {
    if (v == kInf)
        return "inf";
    if (v == -kInf)
        return "-inf";
    return fmt::format("{}", v);
}

} // namespace

MilpInstance read_mps(std::string_view text) { return Reader().parse(text); }

MilpInstance read_mps_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return read_mps(ss.str());
}

std::string write_mps(const MilpInstance &inst) {
    std::string out;
    auto line = [&out](std::string_view s) {
        out.append(s);
        out.push_back('\n');
    };
    line(inst.name().empty() ? std::string("NAME") : fmt::format("NAME {}", inst.name()));
    line("ROWS");
    line(fmt::format(" N {}", inst.obj_name()));
    for (const auto &r : inst.rows()) {
        char type = 'L';
        if (r.lhs == r.rhs)
            type = 'E';
        else if (r.lhs > -kInf && r.rhs == kInf)
            type = 'G';
        line(fmt::format(" {} {}", type, r.name));
    }

    // Column-major view of the row-major matrix; rows are visited in order so
    // entries within each column stay sorted by row.
    std::vector<std::vector<std::pair<std::size_t, double>>> by_col(inst.num_cols());
    for (std::size_t i = 0; i < inst.num_rows(); ++i)
        for (const auto &e : inst.row(i).entries)
            by_col[static_cast<std::size_t>(e.col)].emplace_back(i, e.value);

    line("COLUMNS");
    bool in_int = false;
    int marker = 0;
    for (std::size_t j = 0; j < inst.num_cols(); ++j) {
        const auto &c = inst.col(j);
        if (c.integral != in_int) {
            line(fmt::format(" M{} 'MARKER' '{}'", marker++, c.integral ? "INTORG" : "INTEND"));
            in_int = c.integral;
        }
        if (c.obj != 0.0 || by_col[j].empty())
            line(fmt::format(" {} {} {}", c.name, inst.obj_name(), num(c.obj)));
        for (const auto &[i, v] : by_col[j])
            line(fmt::format(" {} {} {}", c.name, inst.row(i).name, num(v)));
    }
    if (in_int)
        line(fmt::format(" M{} 'MARKER' 'INTEND'", marker++));

    line("RHS");
    if (inst.obj_offset() != 0.0)
        line(fmt::format(" RHS {} {}", inst.obj_name(), num(-inst.obj_offset())));
    for (const auto &r : inst.rows()) {
        const double b = (r.lhs > -kInf && (r.rhs == kInf || r.lhs == r.rhs)) ? r.lhs : r.rhs;
        if (b != 0.0)
            line(fmt::format(" RHS {} {}", r.name, num(b)));
    }

    line("RANGES");
    for (const auto &r : inst.rows())
        if (r.lhs > -kInf && r.rhs < kInf && r.lhs != r.rhs)
            line(fmt::format(" RNG {} {}", r.name, num(r.rhs - r.lhs)));

    line("BOUNDS");
    for (const auto &c : inst.cols()) {
        if (c.lower == c.upper) {
            line(fmt::format(" FX BND {} {}", c.name, num(c.lower)));
            continue;
        }
        if (c.lower == -kInf && c.upper == kInf) {
            line(fmt::format(" FR BND {}", c.name));
            continue;
        }
        if (c.lower == -kInf)
            line(fmt::format(" MI BND {}", c.name));
        else if (c.lower != 0.0 || std::signbit(c.lower))
            line(fmt::format(" LO BND {} {}", c.name, num(c.lower)));
        if (c.upper != kInf)
            line(fmt::format(" UP BND {} {}", c.name, num(c.upper)));
    }
    line("ENDATA");
    return out;
}

void write_mps_file(const MilpInstance &inst, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    out << write_mps(inst);
}

} // namespace n2n
