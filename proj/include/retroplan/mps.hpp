#pragma once
// MPS writer/reader plus a solution-file importer for hand-off to external
// MILP solvers.
//
// Row and column names are mangled to R%07d / X%07d (8 chars, safe for fixed
// field widths everywhere) and the real registry names are written to a
// tab-separated sidecar map. Values are printed one coefficient per line in
// shortest round-trip form (std::to_chars), so write->read reproduces every
// double bit-exactly. The reader is token-based and accepts lines whose value
// field runs past the classic 12-character column.
//
// Integer columns sit inside 'INTORG'/'INTEND' marker pairs and always get an
// explicit bound line: several solvers default an integer column's upper
// bound to 1 when no BOUNDS entry names it.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "retroplan/errors.hpp"
#include "retroplan/model.hpp"

namespace retroplan {

inline std::string format_shortest(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw IoError("failed to format numeric value");
    return std::string(buf, p);
}

namespace detail {

inline std::string mangle(char prefix, int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%07d", prefix, i);
    return buf;
}

inline bool mps_infinite(double v) { return v >= 0.1 * kInf || v <= -0.1 * kInf; }

inline double parse_mps_number(const std::string& tok, const std::string& where) {
    double v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        throw ParseError("bad numeric token '" + tok + "' in " + where);
    return v;
}

inline std::vector<std::string> tokens_of(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) toks.push_back(std::move(t));
    return toks;
}

}  // namespace detail

// Writes the model in MPS form next to a names sidecar. The objective row is
// named COST; a nonzero objective constant is carried as -constant on the
// COST row of the RHS section, the usual convention.
inline void write_mps(const MilpModel& model, const std::string& mps_path,
                      const std::string& map_path) {
    std::ofstream f(mps_path);
    if (!f) throw IoError("cannot write '" + mps_path + "'");
    std::ofstream nm(map_path);
    if (!nm) throw IoError("cannot write '" + map_path + "'");

    auto pad = [](const std::string& s, size_t w) {
        return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' ');
    };

    nm << "COST\tobjective\n";
    for (size_t i = 0; i < model.rows.size(); ++i)
        nm << detail::mangle('R', static_cast<int>(i)) << '\t' << model.rows[i].name << '\n';
    for (size_t j = 0; j < model.vars.size(); ++j)
        nm << detail::mangle('X', static_cast<int>(j)) << '\t' << model.vars[j].name << '\n';
    nm.close();
    if (!nm) throw IoError("error while writing '" + map_path + "'");

    f << "NAME          RETROPLAN\n";
    f << "ROWS\n";
    f << " N  COST\n";
    for (size_t i = 0; i < model.rows.size(); ++i) {
        char sense = model.rows[i].sense == Sense::le ? 'L' : model.rows[i].sense == Sense::ge ? 'G' : 'E';
        f << ' ' << sense << "  " << detail::mangle('R', static_cast<int>(i)) << '\n';
    }

    // column-major entries; every column appears at least once so the reader
    // reconstructs the full variable list
    std::vector<std::vector<std::pair<int, double>>> by_col(model.vars.size());
    for (size_t i = 0; i < model.rows.size(); ++i)
        for (const auto& [c, v] : model.rows[i].coeffs) by_col[c].emplace_back(static_cast<int>(i), v);

    f << "COLUMNS\n";
    bool in_int = false;
    int marker = 0;
    for (size_t j = 0; j < model.vars.size(); ++j) {
        bool want_int = model.vars[j].kind == VarKind::integer;
        if (want_int != in_int) {
            f << "    " << pad("MARKER" + std::to_string(marker++), 10) << pad("'MARKER'", 10)
              << (want_int ? "'INTORG'" : "'INTEND'") << '\n';
            in_int = want_int;
        }
        std::string col = detail::mangle('X', static_cast<int>(j));
        bool wrote = false;
        if (model.vars[j].obj != 0) {
            f << "    " << pad(col, 10) << pad("COST", 10) << format_shortest(model.vars[j].obj)
              << '\n';
            wrote = true;
        }
        for (const auto& [row, v] : by_col[j]) {
            f << "    " << pad(col, 10) << pad(detail::mangle('R', row), 10) << format_shortest(v)
              << '\n';
            wrote = true;
        }
        if (!wrote) f << "    " << pad(col, 10) << pad("COST", 10) << "0\n";
    }
    if (in_int)
        f << "    " << pad("MARKER" + std::to_string(marker++), 10) << pad("'MARKER'", 10)
          << "'INTEND'\n";

    f << "RHS\n";
    for (size_t i = 0; i < model.rows.size(); ++i)
        if (model.rows[i].rhs != 0)
            f << "    " << pad("RHS", 10) << pad(detail::mangle('R', static_cast<int>(i)), 10)
              << format_shortest(model.rows[i].rhs) << '\n';
    if (model.obj_constant != 0)
        f << "    " << pad("RHS", 10) << pad("COST", 10) << format_shortest(-model.obj_constant)
          << '\n';

    f << "BOUNDS\n";
    for (size_t j = 0; j < model.vars.size(); ++j) {
        const auto& v = model.vars[j];
        std::string col = detail::mangle('X', static_cast<int>(j));
        bool lo_inf = detail::mps_infinite(v.lower);
        bool up_inf = detail::mps_infinite(v.upper);
        if (!lo_inf && !up_inf && v.lower == v.upper) {
            f << " FX " << pad("BND", 10) << pad(col, 10) << format_shortest(v.lower) << '\n';
            continue;
        }
        if (lo_inf)
            f << " MI " << pad("BND", 10) << col << '\n';
        else if (v.lower != 0)
            f << " LO " << pad("BND", 10) << pad(col, 10) << format_shortest(v.lower) << '\n';
        if (!up_inf)
            f << " UP " << pad("BND", 10) << pad(col, 10) << format_shortest(v.upper) << '\n';
        else if (v.kind == VarKind::integer)
            f << " PL " << pad("BND", 10) << col << '\n';
    }
    f << "ENDATA\n";
    f.close();
    if (!f) throw IoError("error while writing '" + mps_path + "'");
}

inline std::unordered_map<std::string, std::string> read_names_map(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw MissingFile("cannot open '" + path + "'");
    std::unordered_map<std::string, std::string> map;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected <name>\\t<name>");
        map.emplace(line.substr(0, tab), line.substr(tab + 1));
    }
    return map;
}

// Token-based MPS reader. When a names map is given, registry names are
// restored so a write->read round trip reproduces the original model.
inline MilpModel read_mps(const std::string& mps_path, const std::string& map_path = "") {
    std::ifstream f(mps_path);
    if (!f) throw MissingFile("cannot open '" + mps_path + "'");
    std::unordered_map<std::string, std::string> names;
    if (!map_path.empty()) names = read_names_map(map_path);
    auto real_name = [&](const std::string& n) {
        auto it = names.find(n);
        return it == names.end() ? n : it->second;
    };

    MilpModel model;
    std::unordered_map<std::string, int> row_index;
    std::string obj_row;
    enum class Section { none, rows, columns, rhs, ranges, bounds, done };
    Section sec = Section::none;
    bool in_int = false;
    std::string line;
    int lineno = 0;

    auto row_of = [&](const std::string& tok) {
        auto it = row_index.find(tok);
        if (it == row_index.end())
            throw ParseError(mps_path + ":" + std::to_string(lineno) + ": unknown row '" + tok + "'");
        return it->second;
    };
    auto col_of = [&](const std::string& tok) {
        std::string name = real_name(tok);
        auto it = model.registry.find(name);
        if (it != model.registry.end()) return it->second;
        return model.add_var(name, in_int ? VarKind::integer : VarKind::continuous, 0, kInf);
    };

    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '*') continue;
        bool header = line[0] != ' ' && line[0] != '\t';
        auto toks = detail::tokens_of(line);
        if (toks.empty()) continue;
        if (header) {
            const std::string& h = toks[0];
            if (h == "NAME") continue;
            if (h == "ROWS") sec = Section::rows;
            else if (h == "COLUMNS") sec = Section::columns;
            else if (h == "RHS") sec = Section::rhs;
            else if (h == "RANGES") sec = Section::ranges;
            else if (h == "BOUNDS") sec = Section::bounds;
            else if (h == "ENDATA") { sec = Section::done; break; }
            else throw ParseError(mps_path + ":" + std::to_string(lineno) + ": unknown section '" + h + "'");
            continue;
        }
        switch (sec) {
            case Section::rows: {
                if (toks.size() != 2)
                    throw ParseError(mps_path + ":" + std::to_string(lineno) + ": bad ROWS line");
                if (toks[0] == "N") {
                    if (!obj_row.empty())
                        throw ParseError(mps_path + ":" + std::to_string(lineno) +
                                         ": multiple objective rows");
                    obj_row = toks[1];
                    continue;
                }
                Sense s = toks[0] == "L"   ? Sense::le
                          : toks[0] == "G" ? Sense::ge
                          : toks[0] == "E" ? Sense::eq
                                           : throw ParseError(mps_path + ":" + std::to_string(lineno) +
                                                              ": bad row sense '" + toks[0] + "'");
                row_index.emplace(toks[1], static_cast<int>(model.rows.size()));
                model.rows.push_back({real_name(toks[1]), {}, s, 0.0});
                break;
            }
            case Section::columns: {
                bool is_marker = false;
                for (const auto& t : toks)
                    if (t == "'MARKER'") is_marker = true;
                if (is_marker) {
                    for (const auto& t : toks) {
                        if (t == "'INTORG'") in_int = true;
                        if (t == "'INTEND'") in_int = false;
                    }
                    continue;
                }
                if (toks.size() < 3 || toks.size() % 2 == 0)
                    throw ParseError(mps_path + ":" + std::to_string(lineno) + ": bad COLUMNS line");
                int col = col_of(toks[0]);
                for (size_t i = 1; i + 1 < toks.size(); i += 2) {
                    double v = detail::parse_mps_number(toks[i + 1], mps_path + ":" + std::to_string(lineno));
                    if (toks[i] == obj_row)
                        model.vars[col].obj += v;
                    else
                        model.rows[row_of(toks[i])].coeffs.emplace_back(col, v);
                }
                break;
            }
            case Section::rhs: {
                if (toks.size() < 3 || toks.size() % 2 == 0)
                    throw ParseError(mps_path + ":" + std::to_string(lineno) + ": bad RHS line");
                for (size_t i = 1; i + 1 < toks.size(); i += 2) {
                    double v = detail::parse_mps_number(toks[i + 1], mps_path + ":" + std::to_string(lineno));
                    if (toks[i] == obj_row)
                        model.obj_constant = -v;
                    else
                        model.rows[row_of(toks[i])].rhs = v;
                }
                break;
            }
            case Section::ranges:
                throw ParseError(mps_path + ":" + std::to_string(lineno) + ": RANGES not supported");
            case Section::bounds: {
                if (toks.size() < 3)
                    throw ParseError(mps_path + ":" + std::to_string(lineno) + ": bad BOUNDS line");
                const std::string& kind = toks[0];
                int col = col_of(toks[2]);
                auto& v = model.vars[col];
                auto num = [&] {
                    if (toks.size() < 4)
                        throw ParseError(mps_path + ":" + std::to_string(lineno) +
                                         ": bound needs a value");
                    return detail::parse_mps_number(toks[3], mps_path + ":" + std::to_string(lineno));
                };
                if (kind == "UP") v.upper = num();
                else if (kind == "LO") v.lower = num();
                else if (kind == "FX") v.lower = v.upper = num();
                else if (kind == "MI") v.lower = -kInf;
                else if (kind == "PL") v.upper = kInf;
                else if (kind == "BV") { v.lower = 0; v.upper = 1; v.kind = VarKind::integer; }
                else if (kind == "LI") { v.lower = num(); v.kind = VarKind::integer; }
                else if (kind == "UI") { v.upper = num(); v.kind = VarKind::integer; }
                else throw ParseError(mps_path + ":" + std::to_string(lineno) +
                                      ": unknown bound type '" + kind + "'");
                break;
            }
            case Section::none:
                throw ParseError(mps_path + ":" + std::to_string(lineno) + ": data before a section");
            case Section::done:
                break;
        }
    }
    if (sec != Section::done) throw ParseError(mps_path + ": missing ENDATA");
    if (obj_row.empty()) throw ParseError(mps_path + ": no objective row");
    for (auto& r : model.rows) std::sort(r.coeffs.begin(), r.coeffs.end());
    return model;
}

// Reads `<name> <value>` lines (comments start with '#'); names may be the
// mangled MPS names or the original registry names. Lines whose first token
// is neither are skipped, which tolerates solver log headers in .sol files.
inline std::map<std::string, double> import_solution(const std::string& sol_path,
                                                     const std::string& map_path) {
    auto names = read_names_map(map_path);
    std::unordered_map<std::string, bool> real;
    for (const auto& [k, v] : names) real.emplace(v, true);

    std::ifstream f(sol_path);
    if (!f) throw MissingFile("cannot open '" + sol_path + "'");
    std::map<std::string, double> out;
    std::string line;
    int lineno = 0;
    bool saw_content = false;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto toks = detail::tokens_of(line);
        if (toks.empty()) continue;
        saw_content = true;
        std::string name;
        if (auto it = names.find(toks[0]); it != names.end())
            name = it->second;
        else if (real.count(toks[0]))
            name = toks[0];
        else
            continue;
        if (toks.size() < 2)
            throw ParseError(sol_path + ":" + std::to_string(lineno) + ": missing value for '" +
                             toks[0] + "'");
        out[name] = detail::parse_mps_number(toks[1], sol_path + ":" + std::to_string(lineno));
    }
    if (saw_content && out.empty())
        throw SchemaError(sol_path + ": no recognizable variable entries");
    return out;
}

}  // namespace retroplan
