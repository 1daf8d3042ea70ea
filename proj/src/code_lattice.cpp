#include "qtb/code_lattice.hpp"

#include <cstdlib>
#include <stdexcept>

namespace qtb {

CodeLayout build_code(int distance) {
    if (distance < 3 || distance % 2 == 0)
        throw std::invalid_argument("build_code: distance must be odd and >= 3");

    const int d = distance;
    const int n = d * d;
    const int m = (d * d - 1) / 2;

    CodeLayout L;
    L.distance = d;
    L.n_data = n;
    L.h_x = BitMatrix(m, n);
    L.h_z = BitMatrix(m, n);
    L.x_coords.reserve(m);
    L.z_coords.reserve(m);

    auto corners = [&](int fr, int fc, int* out) {
        int cnt = 0;
        for (int dr = 0; dr <= 1; ++dr)
            for (int dc = 0; dc <= 1; ++dc) {
                int r = fr + dr, c = fc + dc;
                if (r >= 0 && r < d && c >= 0 && c < d) out[cnt++] = r * d + c;
            }
        return cnt;
    };

    int nx = 0, nz = 0;
    int qs[4];
    for (int fr = -1; fr < d; ++fr) {
        for (int fc = -1; fc < d; ++fc) {
            int cnt = corners(fr, fc, qs);
            bool xpar = ((fr + fc) & 1) == 0;
            bool take = false;
            if (cnt == 4) {
                take = true;
            } else if (cnt == 2) {
                // weight-2 faces only on the sides matching the check kind
                if (xpar) take = (fr == -1 || fr == d - 1);
                else      take = (fc == -1 || fc == d - 1);
            }
            if (!take) continue;
            if (xpar) {
                for (int i = 0; i < cnt; ++i) L.h_x.row[nx].set(qs[i], true);
                L.x_coords.push_back({fr, fc});
                ++nx;
            } else {
                for (int i = 0; i < cnt; ++i) L.h_z.row[nz].set(qs[i], true);
                L.z_coords.push_back({fr, fc});
                ++nz;
            }
        }
    }
    if (nx != m || nz != m)
        throw std::runtime_error("build_code: internal face count mismatch");

    // All checks have even weight, so the all-ones vector lies in the kernel
    // of both parity matrices; it overlaps any full row or column (the
    // logical string representatives) an odd number of times, which makes it
    // a valid test vector for either residual species.
    L.l_x_test = BitVec(n);
    L.l_z_test = BitVec(n);
    for (int q = 0; q < n; ++q) { L.l_x_test.set(q, true); L.l_z_test.set(q, true); }

    L.x_checks_of_qubit.assign(n, {-1, -1});
    L.z_checks_of_qubit.assign(n, {-1, -1});
    for (int i = 0; i < m; ++i) {
        for (int q = 0; q < n; ++q) {
            if (L.h_x.row[i].get(q)) {
                auto& slot = L.x_checks_of_qubit[q];
                (slot[0] < 0 ? slot[0] : slot[1]) = i;
            }
            if (L.h_z.row[i].get(q)) {
                auto& slot = L.z_checks_of_qubit[q];
                (slot[0] < 0 ? slot[0] : slot[1]) = i;
            }
        }
    }
    for (int q = 0; q < n; ++q)
        if (L.x_checks_of_qubit[q][0] < 0 || L.z_checks_of_qubit[q][0] < 0)
            throw std::runtime_error("build_code: qubit not covered by both check kinds");

    return L;
}

ErrorState make_error_state(const CodeLayout& layout) {
    ErrorState e;
    e.e_x = BitVec(layout.n_data);
    e.e_z = BitVec(layout.n_data);
    e.erased = BitVec(layout.n_data);
    return e;
}

Syndrome extract_syndrome(const CodeLayout& layout, const ErrorState& err) {
    Syndrome s;
    s.s_z = layout.h_z.mul(err.e_x);
    s.s_x = layout.h_x.mul(err.e_z);
    return s;
}

ErrorState residual(const ErrorState& error, const ErrorState& correction) {
    ErrorState r = error;
    r.e_x ^= correction.e_x;
    r.e_z ^= correction.e_z;
    return r;
}

bool logical_failure(const CodeLayout& layout, const ErrorState& res) {
    return res.e_x.parity_and(layout.l_x_test) || res.e_z.parity_and(layout.l_z_test);
}

int face_distance(FaceCoord a, FaceCoord b) {
    return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col));
}

int boundary_distance(const CodeLayout& layout, CheckKind kind, int check) {
    int d = layout.distance;
    if (kind == CheckKind::z) {
        int r = layout.z_coords[check].row;
        return std::min(r + 1, d - 1 - r);  // X chains exit through top/bottom
    }
    int c = layout.x_coords[check].col;
    return std::min(c + 1, d - 1 - c);      // Z chains exit through left/right
}

namespace {

// One diagonal step from face (r, c) toward (r2, c2) flips the corner qubit
// shared by the two faces. When a coordinate already agrees we zigzag, picking
// the direction whose corner stays on the data grid. Intermediate faces that
// are not real checks are fine: the flipped qubit then touches only one real
// check of this kind, and the double-toggle cancellation argument still leaves
// exactly the two endpoints lit.
void walk(const CodeLayout& L, int r, int c, int r2, int c2, std::vector<int>& out) {
    int d = L.distance;
    while (r != r2 || c != c2) {
        int dr = (r2 > r) - (r2 < r);
        int dc = (c2 > c) - (c2 < c);
        if (dr == 0) dr = (r + 1 <= d - 1) ? 1 : -1;
        if (dc == 0) dc = (c + 1 <= d - 1) ? 1 : -1;
        out.push_back(L.qubit_index(r + (dr + 1) / 2, c + (dc + 1) / 2));
        r += dr;
        c += dc;
    }
}

} // namespace

std::vector<int> path_between(const CodeLayout& layout, CheckKind kind, int c1, int c2) {
    const auto& co = (kind == CheckKind::z) ? layout.z_coords : layout.x_coords;
    std::vector<int> out;
    out.reserve(face_distance(co[c1], co[c2]));
    walk(layout, co[c1].row, co[c1].col, co[c2].row, co[c2].col, out);
    return out;
}

std::vector<int> path_to_boundary(const CodeLayout& layout, CheckKind kind, int check) {
    const auto& co = (kind == CheckKind::z) ? layout.z_coords : layout.x_coords;
    int d = layout.distance;
    int r = co[check].row, c = co[check].col;
    std::vector<int> out;
    int steps = boundary_distance(layout, kind, check);
    if (kind == CheckKind::z) {
        int dr = (r + 1 <= d - 1 - r) ? -1 : 1;  // exit through the nearer of top/bottom
        for (int i = 0; i < steps; ++i) {
            int dc = (c + 1 <= d - 1) ? 1 : -1;
            out.push_back(layout.qubit_index(r + (dr + 1) / 2, c + (dc + 1) / 2));
            r += dr;
            c += dc;
        }
    } else {
        int dc = (c + 1 <= d - 1 - c) ? -1 : 1;  // nearer of left/right
        for (int i = 0; i < steps; ++i) {
            int dr = (r + 1 <= d - 1) ? 1 : -1;
            out.push_back(layout.qubit_index(r + (dr + 1) / 2, c + (dc + 1) / 2));
            r += dr;
            c += dc;
        }
    }
    return out;
}

namespace {

void append_matrix_json(std::string& s, const char* name, const BitMatrix& m) {
    s += "  \"";
    s += name;
    s += "\": [";
    for (int i = 0; i < m.rows; ++i) {
        if (i) s += ", ";
        s += '"';
        s += m.row[i].to_string();
        s += '"';
    }
    s += "]";
}

void append_coords_json(std::string& s, const char* name, const std::vector<FaceCoord>& co) {
    s += "  \"";
    s += name;
    s += "\": [";
    for (size_t i = 0; i < co.size(); ++i) {
        if (i) s += ", ";
        s += '[' + std::to_string(co[i].row) + ", " + std::to_string(co[i].col) + ']';
    }
    s += "]";
}

} // namespace

std::string layout_to_json(const CodeLayout& L) {
    std::string s = "{\n";
    s += "  \"distance\": " + std::to_string(L.distance) + ",\n";
    s += "  \"n_data\": " + std::to_string(L.n_data) + ",\n";
    append_matrix_json(s, "h_x", L.h_x);
    s += ",\n";
    append_matrix_json(s, "h_z", L.h_z);
    s += ",\n";
    append_coords_json(s, "x_coords", L.x_coords);
    s += ",\n";
    append_coords_json(s, "z_coords", L.z_coords);
    s += ",\n";
    s += "  \"l_x_test\": \"" + L.l_x_test.to_string() + "\",\n";
    s += "  \"l_z_test\": \"" + L.l_z_test.to_string() + "\"\n";
    s += "}\n";
    return s;
}

} // namespace qtb
