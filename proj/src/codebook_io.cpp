#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "scma/codebook.hpp"
#include "scma/errors.hpp"

namespace scma {

namespace {

std::string shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw FormatError("bad number '" + std::string(s) + "'");
    }
    return v;
}

cplx parse_entry(const std::string& tok) {
    const auto comma = tok.find(',');
    if (comma == std::string::npos) throw FormatError("entry '" + tok + "' is not re,im");
    return {parse_double(std::string_view(tok).substr(0, comma)),
            parse_double(std::string_view(tok).substr(comma + 1))};
}

}  // namespace

void write_codebook(std::ostream& os, const Codebook& cb) {
    const auto& fg = cb.fg;
    os << fg.K << ' ' << fg.N << ' ' << fg.J << ' ' << cb.M << '\n';
    for (int j = 0; j < fg.J; ++j) {
        for (int m = 0; m < cb.M; ++m) {
            for (int k = 0; k < fg.K; ++k) {
                if (k) os << ' ';
                const cplx v = cb.words[j][m][k];
                os << shortest(v.real()) << ',' << shortest(v.imag());
            }
            os << '\n';
        }
    }
}

Codebook read_codebook(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError("empty codebook file");
    std::istringstream header(line);
    int K = 0, N = 0, J = 0, M = 0;
    if (!(header >> K >> N >> J >> M) || K < 1 || N < 1 || J < 1 || M < 2) {
        throw FormatError("header must be 'K N J M' with positive values");
    }
    std::vector<std::vector<CVec>> words(J, std::vector<CVec>(M, CVec(K)));
    for (int j = 0; j < J; ++j) {
        for (int m = 0; m < M; ++m) {
            if (!std::getline(is, line)) throw FormatError("codebook file truncated");
            std::istringstream row(line);
            std::string tok;
            int k = 0;
            while (row >> tok) {
                if (k >= K) throw FormatError("too many entries on a codeword line");
                words[j][m][k++] = parse_entry(tok);
            }
            if (k != K) throw FormatError("codeword line must have K entries");
        }
    }
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            throw FormatError("trailing data after codebook");
        }
    }

    std::vector<std::vector<int>> supports(J);
    for (int j = 0; j < J; ++j) {
        for (int k = 0; k < K; ++k) {
            if (words[j][0][k] != cplx{}) supports[j].push_back(k);
        }
        if (static_cast<int>(supports[j].size()) != N) {
            throw FormatError("codeword must have exactly N nonzero entries");
        }
    }
    Codebook cb;
    try {
        cb.fg = FactorGraph::from_supports(K, std::move(supports));
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("invalid factor graph: ") + e.what());
    }
    cb.M = M;
    cb.words = std::move(words);
    cb.labels.resize(M);
    for (int m = 0; m < M; ++m) cb.labels[m] = static_cast<unsigned>(m);
    validate_codebook(cb);
    return cb;
}

}  // namespace scma
