#pragma once
#include "klm/spectral.hpp"

namespace klm {

struct SpinReport {
  double ground_energy = 0.0;
  double gap = 0.0;  // first level above the ground multiplet, global
  int degeneracy = 0;
  std::vector<int> ground_sectors;        // twoM of each contributing sector
  std::vector<int> sector_multiplicity;   // parallel to ground_sectors
  double S = 0.0;                         // half-integer solving <S2> = S(S+1)
  double S_deviation = 0.0;               // worst |S_vector - S| over the multiplet
};

// one Hermitian block per sector (rows basis identifies the sector); computes
// the global ground multiplet and its total spin; refuses to report when the
// gap is too close to the grouping tolerance to trust the multiplicity
SpinReport ground_multiplet_spin(const std::vector<OperatorMatrix>& sector_hams,
                                 double gap_tol = 1e-6);

enum class SignClass { positive, negative, indeterminate };

struct CorrelationEntry {
  int x = 0, y = 0;
  std::string pair;  // "s+s-", "s-s+", "s+S-", "s-S+", "S+S-", "S-S+"
  cplx value;
  SignClass sign = SignClass::indeterminate;
};

// the six ladder-pair expectations on one sector vector; magnitudes below
// 1e-12 are classified indeterminate, never silently signed
std::vector<CorrelationEntry> correlation_signs(const SectorBasis& b,
                                                const Eigen::VectorXcd& psi, int x, int y);

// basis in which cone membership is entrywise nonnegativity
struct ConeBasis {
  enum class Representation { fock_g0, position_grid };
  Representation rep = Representation::fock_g0;
  Eigen::MatrixXcd phonon_transform;  // identity for fock_g0; per-mode quadrature otherwise
  std::vector<double> nodes;          // quadrature nodes, mode-major (grid only)
  double orthonormality_defect = 0.0;
  double tol = 1e-12;  // nonnegativity tolerance for this representation
};

// requires g identically zero and the phonon-free truncation (the cone
// statement is about the electron factor; free phonons are diagonal here)
ConeBasis cone_fock_g0(const SectorBasis& b, const ModelParams& p);
// per-mode quadrature representation for g != 0: eigenbasis of the truncated
// position operator per mode, signs fixed so the vacuum row is positive;
// an approximation to the continuum cone, and labeled as such in reports
ConeBasis cone_position_grid(const SectorBasis& b);

struct PositivityReport {
  std::string representation;
  double offdiag_max = 0.0;   // (a) largest off-diagonal real part (free phonons excluded)
  double offdiag_imag = 0.0;
  bool check_a = false;
  struct BetaCheck {
    double beta = 0.0;
    double min_entry = 0.0, max_entry = 0.0;
    bool nonnegative = false;       // (b)
    bool strictly_positive = false;  // (c)
  };
  std::vector<BetaCheck> heat;
  bool check_b = false, check_c = false;
  double ground_min_ratio = 0.0;  // (d) min/max entry of the phase-fixed ground vector
  bool check_d = false;
  bool passed = false;
};

// (a) sign structure of the generator, (b)/(c) entrywise (strict) positivity
// of the heat kernel per beta, (d) positivity of the phase-fixed ground
// vector; phonon_energy is excluded from (a) since a quadrature change makes
// the free-oscillator term sign-indefinite off the diagonal.  All four gate
// `passed` in the fock representation; the position grid approximates the
// continuum cone, so only (b) at the grid tolerance and (d) gate it there
// ((a) and (c) are still measured and reported)
PositivityReport positivity_audit(const OperatorMatrix& H_tilde,
                                  const OperatorMatrix& phonon_energy, const ConeBasis& cone,
                                  const std::vector<double>& betas);

// unit-phase rotation making the largest-magnitude entry real positive
Eigen::VectorXcd phase_fixed(const Eigen::VectorXcd& v);
// phase-fixes both vectors and returns Re<a,b>; throws when a vector is not
// essentially real after fixing (wrong cone representation)
double positive_overlap(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

struct CertificateStep {
  enum class Kind { hop, flip } kind = Kind::hop;
  int from = -1, to = -1;  // hop
  int site = -1;           // flip
};

struct Certificate {
  std::vector<CertificateStep> steps;  // applied first to last
  OperatorMatrix chain;                // composed product on the sector basis
  cplx element;                        // <target| chain |source>
  double expected_scalar = 0.0;        // product of the participating t and J
  int hops = 0, flips = 0;
};

// connects two same-sector electron configurations by routed hops and on-site
// exchange flips; phonon-free truncation required (scalar certificates)
Certificate ergodicity_certificate(const SectorBasis& b, const Lattice& g, double J,
                                   const ElectronState& source, const ElectronState& target);

}  // namespace klm
