#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "canon.hpp"
#include "polytope.hpp"
#include "scenario.hpp"

namespace bellscope {

/// Term label in the input notation: "a1b2", with "[o]" for outcomes other than the first.
inline std::string term_label(const MarginalTerm &t, bool correlator = false) {
    std::string out;
    for (std::size_t j = 0; j < t.parties.size(); ++j) {
        char c = static_cast<char>('a' + t.parties[j]);
        out += correlator ? static_cast<char>(c - 'a' + 'A') : c;
        out += std::to_string(t.settings[j] + 1);
        if (t.outcomes[j] != 0)
            out += "[" + std::to_string(t.outcomes[j]) + "]";
    }
    return out;
}

/// Collins-Gisin rendering of a no-signalling inequality. Bipartite
/// inequalities print as the block table (corner = -bound, read "<= 0";
/// setting blocks are separated only when k > 2); other scenarios print as a
/// term list.
inline std::string render_cg_table(const Inequality &ineq, const Scenario &s) {
    if (ineq.param != Param::NoSignalling || ineq.symmetric_basis)
        throw PreconditionError("render expects a full-space Collins-Gisin inequality");
    const auto &cg = collins_gisin_index(s);
    std::ostringstream os;
    if (s.parties != 2) {
        bool any = false;
        for (std::size_t i = 0; i < cg.size(); ++i) {
            if (sgn(ineq.coeffs[i]) == 0)
                continue;
            os << (sgn(ineq.coeffs[i]) > 0 ? (any ? " + " : "") : (any ? " - " : "-"));
            Rational mag = abs(ineq.coeffs[i]);
            if (mag != 1)
                os << to_string(mag) << " ";
            os << "p(" << term_label(cg.term(i)) << ")";
            any = true;
        }
        if (!any)
            os << "0";
        os << " <= " << to_string(ineq.bound) << "\n";
        return os.str();
    }
    const int m = s.settings, k = s.outcomes;
    const int lines = m * (k - 1);
    std::vector<std::vector<std::string>> cells(lines + 1, std::vector<std::string>(lines + 1));
    for (int r = 0; r <= lines; ++r)
        for (int c = 0; c <= lines; ++c) {
            if (r == 0 && c == 0) {
                cells[0][0] = sgn(ineq.bound) == 0 ? "" : to_string(Rational(-ineq.bound));
                continue;
            }
            std::vector<int> st{r == 0 ? -1 : r - 1, c == 0 ? -1 : c - 1};
            cells[r][c] = to_string(ineq.coeffs[cg.index_of_states(st)]);
        }
    std::size_t width = 1;
    for (const auto &row : cells)
        for (const auto &c : row)
            width = std::max(width, c.size());
    auto pad = [&](const std::string &c) { return std::string(width + 1 - c.size(), ' ') + c; };
    auto rule = [&](char ch) {
        std::string line(width + 1, ch);
        line += "++";
        for (int x = 0; x < m; ++x) {
            if (x && k > 2)
                line += "+";
            line += std::string(static_cast<std::size_t>((k - 1) * (width + 1)), ch);
        }
        return line;
    };
    for (int r = 0; r <= lines; ++r) {
        if (r == 1)
            os << rule('=') << "\n";
        else if (k > 2 && r > 1 && (r - 1) % (k - 1) == 0)
            os << rule('-') << "\n";
        os << pad(cells[r][0]) << "||";
        for (int c = 1; c <= lines; ++c) {
            if (k > 2 && c > 1 && (c - 1) % (k - 1) == 0)
                os << "|";
            os << pad(cells[r][c]);
        }
        os << "\n";
    }
    os << "<= 0\n";
    return os.str();
}

/// Rendering of a canonical correlator form through its Collins-Gisin expression.
inline std::string render_cg_table(const CorrelatorForm &cf) {
    return render_cg_table(from_correlator_form(cf), cf.scenario);
}

} // namespace bellscope
