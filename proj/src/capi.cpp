#include "shiftconv/shiftconv.h"

#include "shiftconv/arith.hpp"
#include "shiftconv/detmat.hpp"
#include "shiftconv/error.hpp"
#include "shiftconv/experiments.hpp"
#include "shiftconv/mainterm.hpp"
#include "shiftconv/numeric.hpp"
#include "shiftconv/sl2.hpp"
#include "shiftconv/sums.hpp"
#include "shiftconv/weights.hpp"

#include <cmath>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

using namespace shiftconv;

struct sc_divisor_table {
    DivisorTable table;
};
struct sc_weight {
    SmoothWeight w;
};
struct sc_config {
    ExperimentConfig cfg;
};
struct sc_report {
    ErrorReport report;
};
struct sc_text {
    std::string s;
};

namespace {

thread_local std::string last_error;

sc_status to_status(Errc e) {
    switch (e) {
    case Errc::invalid_argument: return SC_ERR_INVALID_ARGUMENT;
    case Errc::capacity: return SC_ERR_CAPACITY;
    case Errc::domain: return SC_ERR_DOMAIN;
    case Errc::nonconvergence: return SC_ERR_NONCONVERGENCE;
    case Errc::lemma_violation: return SC_ERR_LEMMA_VIOLATION;
    case Errc::internal: return SC_ERR_INTERNAL;
    case Errc::io: return SC_ERR_IO;
    }
    return SC_ERR_INTERNAL;
}

template <class F>
sc_status guard(F&& f) {
    try {
        last_error.clear();
        f();
        return SC_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return SC_ERR_CAPACITY;
    } catch (const std::exception& e) {
        last_error = e.what();
        return SC_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return SC_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) { require(p != nullptr, Errc::invalid_argument, std::string(what) + " is null"); }

sc_text* make_text(std::string s) { return new sc_text{std::move(s)}; }

std::string fmt(double v) { return format_double(v); }

} // namespace

extern "C" {

const char* sc_last_error(void) { return last_error.c_str(); }
const char* sc_version(void) { return "1.0.0"; }

const char* sc_text_data(const sc_text* t) { return t ? t->s.c_str() : ""; }
void sc_text_free(sc_text* t) { delete t; }

sc_status sc_sieve_dk(int k, uint64_t limit, sc_divisor_table** out) {
    return guard([&] {
        need(out, "out");
        *out = new sc_divisor_table{sieve_dk(k, limit)};
    });
}

sc_status sc_divisor_table_get(const sc_divisor_table* t, uint64_t n, uint64_t* out) {
    return guard([&] {
        need(t, "table");
        need(out, "out");
        require(n <= t->table.limit, Errc::invalid_argument, "index beyond table limit");
        *out = t->table[n];
    });
}

void sc_divisor_table_free(sc_divisor_table* t) { delete t; }

sc_status sc_factorize(uint64_t n, uint64_t* primes, int* exponents, size_t cap, size_t* count) {
    return guard([&] {
        need(count, "count");
        const auto f = factorize(n);
        *count = f.factors.size();
        require(f.factors.size() <= cap || (primes == nullptr && exponents == nullptr), Errc::capacity,
                "factor buffer too small");
        for (std::size_t i = 0; i < f.factors.size() && i < cap; ++i) {
            if (primes) primes[i] = f.factors[i].first;
            if (exponents) exponents[i] = f.factors[i].second;
        }
    });
}

sc_status sc_ramanujan_sum(uint64_t d, int64_t h, int64_t* out) {
    return guard([&] {
        need(out, "out");
        *out = ramanujan_sum(d, h);
    });
}

sc_status sc_gcd_infty(uint64_t d1, uint64_t d2, uint64_t* out) {
    return guard([&] {
        need(out, "out");
        *out = gcd_infty(d1, d2);
    });
}

sc_status sc_weight_create(const char* shape, double lo, double hi, sc_weight** out) {
    return guard([&] {
        need(shape, "shape");
        need(out, "out");
        *out = new sc_weight{SmoothWeight(parse_shape(shape), lo, hi)};
    });
}

sc_status sc_weight_eval(const sc_weight* w, double t, int j, double* out) {
    return guard([&] {
        need(w, "weight");
        need(out, "out");
        *out = j == 0 ? w->w(t) : w->w.eval_deriv(t, j);
    });
}

void sc_weight_free(sc_weight* w) { delete w; }

sc_status sc_direct_sum(int k, int64_t h, double x, const sc_weight* w, int threads, double* out) {
    return guard([&] {
        need(w, "weight");
        need(out, "out");
        *out = direct_sum({k, h, x, w->w}, threads);
    });
}

sc_status sc_certain_sum(uint64_t r1, uint64_t r2, int64_t h, double x, const sc_weight* w1, const sc_weight* w2,
                         double* out) {
    return guard([&] {
        need(w1, "w1");
        need(w2, "w2");
        need(out, "out");
        *out = certain_sum({r1, r2, h, x, w1->w, w2->w});
    });
}

sc_status sc_main_term(int k, int64_t h, double x, const sc_weight* w, double tau, int threads, double* out) {
    return guard([&] {
        need(w, "weight");
        need(out, "out");
        MainTermOptions opt;
        if (tau > 0) opt.tau = tau;
        opt.threads = threads;
        *out = main_term(k, h, x, w->w, opt).value;
    });
}

sc_status sc_verify_detmat(uint64_t r1, uint64_t r2, int64_t h, uint64_t x, int* passed, sc_text** report) {
    return guard([&] {
        need(passed, "passed");
        const auto inst = make_instance(r1, r2, h);
        std::ostringstream os;
        bool ok;
        const u64 hh = static_cast<u64>(h < 0 ? -h : h);
        if (std::gcd(hh, r1 * r2) == 1) {
            const auto c = correspondence_check(inst, x);
            ok = c.equal;
            os << "direct " << c.count_direct << " matrix " << c.count_matrix << '\n';
            if (inst.rt1 != inst.rt2) {
                const auto g = gamma_decomposition_check(inst, x);
                ok = ok && g.ok && g.coprime;
                os << "gamma cells " << g.cells << " total " << g.total << " cell sum " << g.cell_sum << '\n';
            }
        } else {
            const auto s = split_check(inst, x);
            ok = s.equal && s.reduced_det_ok;
            os << "direct " << s.count_direct << " split cells " << s.cells << " cell sum " << s.count_cells << '\n';
        }
        os << (ok ? "PASS" : "FAIL") << '\n';
        *passed = ok ? 1 : 0;
        if (report) *report = make_text(os.str());
    });
}

sc_status sc_verify_cosets(uint64_t qmax, int* passed, sc_text** report) {
    return guard([&] {
        need(passed, "passed");
        require(qmax >= 1 && qmax <= 30, Errc::invalid_argument, "qmax must be in [1, 30]");
        std::ostringstream os;
        bool ok = true;
        for (u64 q1 = 1; q1 <= qmax; ++q1)
            for (u64 q2 = 1; q2 <= qmax; ++q2) {
                const CosetSpace cs(q1, q2);
                bool round_trip = true;
                for (const auto& l : cs.labels())
                    if (cs.coset_of(cs.lift(l)) != l) round_trip = false;
                const bool coprime = std::gcd(q1, q2) == 1;
                const bool index_ok = !coprime || cs.labels().size() == dedekind_psi(q1) * dedekind_psi(q2);
                ok = ok && round_trip && index_ok;
                os << q1 << ' ' << q2 << ' ' << cs.labels().size() << (round_trip && index_ok ? "" : " FAIL") << '\n';
            }
        os << (ok ? "PASS" : "FAIL") << '\n';
        *passed = ok ? 1 : 0;
        if (report) *report = make_text(os.str());
    });
}

sc_status sc_verify_ksum(uint64_t rmax, double bmax, int samples, uint64_t seed, int* passed, sc_text** report) {
    return guard([&] {
        need(passed, "passed");
        require(rmax >= 1 && rmax <= 30, Errc::invalid_argument, "rmax must be in [1, 30]");
        require(bmax >= 1 && bmax <= 1000, Errc::invalid_argument, "bmax must be in [1, 1000]");
        std::ostringstream os;
        double rb = 0, rc = 0, rs = 0;
        for (u64 r1 = 1; r1 <= rmax; ++r1)
            for (u64 r2 = 1; r2 <= rmax; ++r2) {
                if (!is_squarefree(r1) || !is_squarefree(r2)) continue;
                const AutoWeight w(r1, r2);
                const KSumContext ctx(w);
                const double r0sq = static_cast<double>(w.r0() * w.r0());
                const double rt = static_cast<double>(w.rt1() * w.rt2());
                for (double B = 1; B <= bmax; B *= 2) {
                    rb = std::max(rb, ksum_b(ctx, B) / (8 * r0sq * (B + 1)));
                    rc = std::max(rc, ksum_c(ctx, B) / (8 * (r0sq * B / rt + r0sq)));
                }
                const double s = ksum_sigma_sup(w, samples, seed) / r0sq;
                rs = std::max(rs, s);
                if (s > 1) os << "sigma envelope exceeded at r1 = " << r1 << ", r2 = " << r2 << ": ratio " << fmt(s) << '\n';
            }
        os << "max ksum_b ratio " << fmt(rb) << "\nmax ksum_c ratio " << fmt(rc) << "\nmax sigma ratio " << fmt(rs)
           << '\n';
        const bool ok = rb <= 1 && rc <= 1 && rs <= 1;
        os << (ok ? "PASS" : "FAIL") << '\n';
        *passed = ok ? 1 : 0;
        if (report) *report = make_text(os.str());
    });
}

sc_status sc_verify_partition(int resolution, int kmax, const char* delta, int* passed, sc_text** report) {
    return guard([&] {
        need(passed, "passed");
        need(delta, "delta");
        const auto r = verify_partition_grid(resolution, kmax, parse_rational(delta));
        std::ostringstream os;
        os << "points " << r.points << "\nA " << r.count_a << "\nB " << r.count_b << "\nC " << r.count_c
           << "\nviolations " << r.violations << "\nreverify_failures " << r.reverify_failures << '\n';
        const bool ok = r.violations == 0 && r.reverify_failures == 0;
        os << (ok ? "PASS" : "FAIL") << '\n';
        *passed = ok ? 1 : 0;
        if (report) *report = make_text(os.str());
    });
}

sc_status sc_verify_all(uint64_t seed, int* passed, sc_text** report) {
    return guard([&] {
        need(passed, "passed");
        const auto r = verify_all(seed);
        std::ostringstream os;
        for (const auto& i : r.items) os << (i.passed ? "PASS " : "FAIL ") << i.name << ": " << i.detail << '\n';
        *passed = r.all_passed() ? 1 : 0;
        if (report) *report = make_text(os.str());
    });
}

sc_status sc_exponents(const char* delta, const char* theta, const char* h_exp, sc_text** report) {
    return guard([&] {
        need(delta, "delta");
        need(theta, "theta");
        need(h_exp, "h_exp");
        need(report, "report");
        const auto t = exponent_calculator(parse_rational(delta), parse_rational(theta), parse_rational(h_exp));
        std::ostringstream os;
        os << "delta " << format_rational(t.delta) << ", theta " << format_rational(t.theta) << ", h_exp "
           << format_rational(t.h_exp) << '\n';
        for (const auto& r : t.rows) {
            const double v = static_cast<double>(r.exponent.numerator()) / static_cast<double>(r.exponent.denominator());
            os << r.name << ": " << format_rational(r.exponent) << " (" << fmt(v) << ") range " << r.range
               << (r.applies ? " applies" : " out of range") << (r.nontrivial ? ", nontrivial" : ", trivial") << '\n';
        }
        if (t.small_threshold_finite)
            os << "large-h small bound nontrivial for h_exp < " << format_rational(t.small_threshold) << '\n';
        else
            os << "large-h small bound nontrivial for every h_exp < 1\n";
        *report = make_text(os.str());
    });
}

sc_status sc_config_create(sc_config** out) {
    return guard([&] {
        need(out, "out");
        *out = new sc_config{};
    });
}

sc_status sc_config_load(const char* path, sc_config** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = new sc_config{load_config(path)};
    });
}

sc_status sc_config_set(sc_config* cfg, const char* key, const char* value) {
    return guard([&] {
        need(cfg, "config");
        need(key, "key");
        need(value, "value");
        ExperimentConfig next = cfg->cfg;
        set_config_value(next, key, value);
        cfg->cfg = next;
    });
}

void sc_config_free(sc_config* cfg) { delete cfg; }

sc_status sc_run_experiment(const sc_config* cfg, sc_report** out) {
    return guard([&] {
        need(cfg, "config");
        need(out, "out");
        *out = new sc_report{run_experiment(cfg->cfg)};
    });
}

sc_status sc_report_write_csv(const sc_report* r, const char* path) {
    return guard([&] {
        need(r, "report");
        need(path, "path");
        std::ofstream f(path, std::ios::binary);
        require(static_cast<bool>(f), Errc::io, std::string("cannot open ") + path);
        write_csv(r->report, f);
        require(static_cast<bool>(f), Errc::io, std::string("write failed: ") + path);
    });
}

sc_status sc_report_csv(const sc_report* r, sc_text** out) {
    return guard([&] {
        need(r, "report");
        need(out, "out");
        std::ostringstream os;
        write_csv(r->report, os);
        *out = make_text(os.str());
    });
}

size_t sc_report_row_count(const sc_report* r) { return r ? r->report.rows.size() : 0; }

sc_status sc_report_get_row(const sc_report* r, size_t i, double row[5]) {
    return guard([&] {
        need(r, "report");
        need(row, "row");
        require(i < r->report.rows.size(), Errc::invalid_argument, "row index out of range");
        const auto& x = r->report.rows[i];
        row[0] = x.x;
        row[1] = x.S;
        row[2] = x.M;
        row[3] = x.R;
        row[4] = x.absR;
    });
}

sc_status sc_report_slope(const sc_report* r, int* has_slope, double* slope) {
    return guard([&] {
        need(r, "report");
        need(has_slope, "has_slope");
        need(slope, "slope");
        *has_slope = r->report.has_slope ? 1 : 0;
        *slope = r->report.slope;
    });
}

sc_status sc_report_summary(const sc_report* r, sc_text** out) {
    return guard([&] {
        need(r, "report");
        need(out, "out");
        const auto& rep = r->report;
        std::ostringstream os;
        os << "points " << rep.rows.size() << '\n';
        if (rep.has_slope)
            os << "fitted slope " << fmt(rep.slope) << '\n';
        else
            os << "fitted slope undefined\n";
        os << "dropped below noise floor:";
        for (double x : rep.dropped) os << ' ' << fmt(x);
        os << "\npredicted exponent " << format_rational(rep.predicted_exponent) << " (h_exp " << fmt(rep.h_exp)
           << ", x^eps factors omitted)\n";
        *out = make_text(os.str());
    });
}

void sc_report_free(sc_report* r) { delete r; }

} // extern "C"
