#pragma once

#include <complex>
#include <vector>

namespace fsnoma {

// Truncation rule for every power series: stop at the first term with
// |term| <= rel_tol*|sum| + abs_tol whose geometric tail estimate also
// satisfies the bound; fail with TruncationError after max_terms.
struct SeriesControl {
  int max_terms = 200000;
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
};

// Vertical-line trapezoid rule for Mellin-Barnes integrals.
// Nodes y_k in [-half_height, half_height]; the abscissa is offset by shift.
// node_count must be odd so the half-resolution subset exists.
struct ContourControl {
  int node_count = 2049;
  double shift = 0.0;
  double half_height = 40.0;
  double rel_tol = 1e-10;
};

void validate(const SeriesControl& ctl);
void validate(const ContourControl& ctl);

// Real special functions.
double ln_gamma(double x);
double digamma(double x);
double beta(double a, double b);
double ln_beta(double a, double b);
double pochhammer(double x, int n);

// Unnormalised incomplete beta B_c(a, b) = int_0^c t^(a-1) (1-t)^(b-1) dt.
// a > 0 and 0 <= c <= 1; b <= 0 is accepted when c < 1.
double incomplete_beta(double c, double a, double b, const SeriesControl& ctl = {});

// Complex log-gamma; the imaginary part is correct modulo 2*pi.
std::complex<double> ln_gamma(std::complex<double> z);

// 2F1 by power series (|x| < 1), no transformation.
double gauss_2f1_series(double a, double b, double c, double x, const SeriesControl& ctl = {});
// 2F1 for x < 1; x < -1/2 goes through (1-x)^(-b) 2F1(c-a, b; c; x/(x-1)).
double gauss_2f1(double a, double b, double c, double x, const SeriesControl& ctl = {});

// 3F2 by power series for -1/2 < x < 1. For x <= -1/2 and a parameter pair
// with a_i + 1 = b_j the function is written as an integral of a 2F1 and
// summed in incomplete beta functions; without such a pair x <= -1 is rejected
// and -1 < x <= -1/2 uses the power series.
double hyp_3f2(double a1, double a2, double a3, double b1, double b2, double x,
               const SeriesControl& ctl = {});

// Appell F1 double series, requires max(|x1|, |x2|) < 1.
double appell_f1_series(double a, double b1, double b2, double c, double x1, double x2,
                        const SeriesControl& ctl = {});
// Euler integral representation, requires c > a > 0 and x1, x2 < 1.
double appell_f1_integral(double a, double b1, double b2, double c, double x1, double x2,
                          double rel_tol = 1e-12);
// Chooses between direct series, the (x -> x/(x-1)) transformed series and the
// Euler integral, whichever converges best.
double appell_f1(double a, double b1, double b2, double c, double x1, double x2,
                 const SeriesControl& ctl = {});

// Meijer G^{m,n}_{p,q}(x | a; b) with p = a.size(), q = b.size(), in the
// convention (1/2 pi i) int prod Gamma(b_j - s) prod Gamma(1 - a_j + s) /
// (prod Gamma(1 - b_j + s) prod Gamma(a_j - s)) x^s ds.
// The contour abscissa sits midway between the pole families, plus ctl.shift.
double meijer_g(int m, int n, const std::vector<double>& a, const std::vector<double>& b,
                double x, const ContourControl& ctl = {});
// Same integral on an explicitly chosen abscissa. Used for parameter sets whose
// pole families touch, where only a specific contour defines the value.
double meijer_g_at(int m, int n, const std::vector<double>& a, const std::vector<double>& b,
                   double x, double abscissa, const ContourControl& ctl = {});
// Sum of residues at the right poles b_h + k (all simple). Requires q > p, or
// p == q with x < 1.
double meijer_g_residues(int m, int n, const std::vector<double>& a, const std::vector<double>& b,
                         double x, const SeriesControl& ctl = {});

// One parameter block of a bivariate G.
struct GBlock {
  int m = 0;
  int n = 0;
  std::vector<double> a;
  std::vector<double> b;
};

// Bivariate G^{m0,n0:m1,n1:m2,n2}[x1, x2 | block0 | block1 | block2] defined as
// (1/2 pi i)^2 int int Phi0(s+t) Phi1(s) Phi2(t) x1^s x2^t ds dt, where each
// Phi is the single-variable kernel above for its block.
struct BivariateKernel {
  GBlock b0;
  GBlock b1;
  GBlock b2;
};

double meijer_g_bivariate(const BivariateKernel& k, double x1, double x2,
                          const ContourControl& ctl = {801, 0.0, 30.0, 1e-6});
double meijer_g_bivariate_at(const BivariateKernel& k, double x1, double x2, double c1, double c2,
                             const ContourControl& ctl = {801, 0.0, 30.0, 1e-6});

}  // namespace fsnoma
