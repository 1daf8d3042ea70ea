#pragma once

#include <array>
#include <string>
#include <vector>

#include "qtb/bitvec.hpp"

namespace qtb {

enum class CheckKind { x, z };

// Face coordinate on the rotated lattice. Data qubits sit on the integer grid
// (r, c) with 0 <= r, c < d; a face (row, col) has its corners at
// (row, col), (row, col+1), (row+1, col), (row+1, col+1), clipped to the grid.
// X checks live on even-parity faces (row+col even) with their weight-2
// boundary faces on the top/bottom edges; Z checks live on odd-parity faces
// with boundary faces on the left/right edges.
struct FaceCoord {
    int row = 0, col = 0;
};

struct CodeLayout {
    int distance = 0;
    int n_data = 0;
    BitMatrix h_x, h_z;       // (d^2-1)/2 rows each, d^2 columns
    BitVec l_x_test, l_z_test; // test vectors paired with residual e_x / e_z
    std::vector<FaceCoord> x_coords, z_coords;
    // the one or two checks of each kind touching a given data qubit; the
    // second slot is -1 for qubits on that kind's boundary
    std::vector<std::array<int, 2>> x_checks_of_qubit, z_checks_of_qubit;

    int qubit_index(int r, int c) const { return r * distance + c; }
};

CodeLayout build_code(int distance);

struct ErrorState {
    BitVec e_x, e_z;  // X / Z flip indicators per data qubit
    BitVec erased;    // loss flags; carried along, decoders may ignore
};

ErrorState make_error_state(const CodeLayout& layout);

struct Syndrome {
    BitVec s_z;  // h_z * e_x, lights Z checks
    BitVec s_x;  // h_x * e_z, lights X checks
};

Syndrome extract_syndrome(const CodeLayout& layout, const ErrorState& err);

// componentwise XOR of error and correction; erased flags follow the error
ErrorState residual(const ErrorState& error, const ErrorState& correction);

// true iff <e_x, l_x_test> = 1 or <e_z, l_z_test> = 1
bool logical_failure(const CodeLayout& layout, const ErrorState& res);

// Graph geometry used by the matching decoders. Two same-kind checks are one
// unit apart when they share a data qubit (diagonal face neighbours), so the
// minimal number of data flips connecting them is the Chebyshev distance in
// face coordinates, equivalently the Manhattan distance in the 45-degree
// rotated half-integer frame.
int face_distance(FaceCoord a, FaceCoord b);
int boundary_distance(const CodeLayout& layout, CheckKind kind, int check);

// Qubits along one minimal chain joining two same-kind checks (or a check and
// its nearest boundary). Flipping the returned qubits toggles exactly the
// named checks and nothing else.
std::vector<int> path_between(const CodeLayout& layout, CheckKind kind, int c1, int c2);
std::vector<int> path_to_boundary(const CodeLayout& layout, CheckKind kind, int check);

std::string layout_to_json(const CodeLayout& layout);

} // namespace qtb
