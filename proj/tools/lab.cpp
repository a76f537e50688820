#include "shiftconv/shiftconv.h"

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>

namespace {

// 0 success, 1 verification failure, 2 configuration or capacity error
int exit_for(sc_status s) {
    if (s == SC_OK) return 0;
    std::fprintf(stderr, "error: %s\n", sc_last_error());
    return s == SC_ERR_LEMMA_VIOLATION ? 1 : 2;
}

struct TextDeleter {
    void operator()(sc_text* t) const { sc_text_free(t); }
};
struct WeightDeleter {
    void operator()(sc_weight* w) const { sc_weight_free(w); }
};
using TextPtr = std::unique_ptr<sc_text, TextDeleter>;
using WeightPtr = std::unique_ptr<sc_weight, WeightDeleter>;

int print_verification(sc_status s, int passed, sc_text* raw) {
    TextPtr text(raw);
    if (s != SC_OK) return exit_for(s);
    std::fputs(sc_text_data(text.get()), stdout);
    return passed ? 0 : 1;
}

int make_weight(const std::string& shape, WeightPtr& out) {
    sc_weight* w = nullptr;
    const sc_status s = sc_weight_create(shape.c_str(), 0.5, 1.0, &w);
    out.reset(w);
    return exit_for(s);
}

void print_value(double v) { std::printf("%.17g\n", v); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shifted divisor convolution lab"};
    // --h is the shift, so help is long-form only
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    int code = 0;

    auto* run = app.add_subcommand("run", "Run an experiment grid and write x,S,M,R,absR as CSV");
    std::string config_path, out_path;
    int run_threads = 0;
    run->add_option("--config", config_path, "key = value config file")->required();
    run->add_option("--out", out_path, "CSV output path (default: stdout)");
    run->add_option("--threads", run_threads, "override the config's thread count");
    run->callback([&] {
        sc_config* cfg = nullptr;
        sc_status s = sc_config_load(config_path.c_str(), &cfg);
        if (s != SC_OK) {
            code = exit_for(s);
            return;
        }
        if (run_threads > 0) s = sc_config_set(cfg, "threads", std::to_string(run_threads).c_str());
        sc_report* rep = nullptr;
        if (s == SC_OK) s = sc_run_experiment(cfg, &rep);
        sc_config_free(cfg);
        if (s == SC_OK && !out_path.empty()) s = sc_report_write_csv(rep, out_path.c_str());
        if (s == SC_OK && out_path.empty()) {
            sc_text* csv = nullptr;
            s = sc_report_csv(rep, &csv);
            if (s == SC_OK) std::fputs(sc_text_data(csv), stdout);
            sc_text_free(csv);
        }
        sc_text* summary = nullptr;
        if (s == SC_OK) s = sc_report_summary(rep, &summary);
        if (s == SC_OK) std::fputs(sc_text_data(summary), stderr);
        sc_text_free(summary);
        sc_report_free(rep);
        code = exit_for(s);
    });

    auto* exps = app.add_subcommand("exponents", "Print the error-exponent table as exact rationals");
    std::string delta = "1/16", theta = "7/64", h_exp = "0";
    exps->add_option("--delta", delta, "delta in [0, 1/16]")->capture_default_str();
    exps->add_option("--theta", theta, "theta in [0, 1/2)")->capture_default_str();
    exps->add_option("--h-exp", h_exp, "log|h| / log x in [0, 1)")->capture_default_str();
    exps->callback([&] {
        sc_text* t = nullptr;
        const sc_status s = sc_exponents(delta.c_str(), theta.c_str(), h_exp.c_str(), &t);
        TextPtr text(t);
        if (s == SC_OK) std::fputs(sc_text_data(t), stdout);
        code = exit_for(s);
    });

    auto* vall = app.add_subcommand("verify-all", "Run every module's verification suite");
    uint64_t seed = 1;
    vall->add_option("--seed", seed)->capture_default_str();
    vall->callback([&] {
        int passed = 0;
        sc_text* t = nullptr;
        const sc_status s = sc_verify_all(seed, &passed, &t);
        code = print_verification(s, passed, t);
    });

    auto* vcos = app.add_subcommand("verify-cosets", "Coset enumeration and lifting round trips");
    uint64_t qmax = 10;
    vcos->add_option("--qmax", qmax)->capture_default_str();
    vcos->callback([&] {
        int passed = 0;
        sc_text* t = nullptr;
        const sc_status s = sc_verify_cosets(qmax, &passed, &t);
        code = print_verification(s, passed, t);
    });

    auto* vks = app.add_subcommand("verify-ksum", "K-sum envelope ratios");
    uint64_t rmax = 15, kseed = 1;
    double bmax = 64;
    int samples = 1000;
    vks->add_option("--rmax", rmax)->capture_default_str();
    vks->add_option("--bmax", bmax)->capture_default_str();
    vks->add_option("--samples", samples)->capture_default_str();
    vks->add_option("--seed", kseed)->capture_default_str();
    vks->callback([&] {
        int passed = 0;
        sc_text* t = nullptr;
        const sc_status s = sc_verify_ksum(rmax, bmax, samples, kseed, &passed, &t);
        code = print_verification(s, passed, t);
    });

    auto* vdet = app.add_subcommand("verify-detmat", "Divisor pairs against determinant-equation matrices");
    uint64_t r1 = 2, r2 = 3, x = 10000;
    int64_t dh = 1;
    vdet->add_option("--r1", r1)->capture_default_str();
    vdet->add_option("--r2", r2)->capture_default_str();
    vdet->add_option("--h", dh)->capture_default_str();
    vdet->add_option("--x", x)->capture_default_str();
    vdet->callback([&] {
        int passed = 0;
        sc_text* t = nullptr;
        const sc_status s = sc_verify_detmat(r1, r2, dh, x, &passed, &t);
        code = print_verification(s, passed, t);
    });

    auto* mt = app.add_subcommand("mainterm", "Main term of sum w(n/x) d_k(n) d(n+h)");
    int mk = 2, mthreads = 1;
    int64_t mh = 1;
    double mx = 1e5, tau = 0;
    std::string mweight = "mollifier";
    mt->add_option("--k", mk)->capture_default_str();
    mt->add_option("--h", mh)->capture_default_str();
    mt->add_option("--x", mx)->capture_default_str();
    mt->add_option("--weight", mweight)->capture_default_str();
    mt->add_option("--tau", tau, "transition width (0 selects the default)");
    mt->add_option("--threads", mthreads)->capture_default_str();
    mt->callback([&] {
        WeightPtr w;
        if ((code = make_weight(mweight, w))) return;
        double v = 0;
        const sc_status s = sc_main_term(mk, mh, mx, w.get(), tau, mthreads, &v);
        if (s == SC_OK) print_value(v);
        code = exit_for(s);
    });

    auto* sum = app.add_subcommand("sum", "sum w(n/x) d_k(n) d(n+h)");
    int sk = 2, sthreads = 1;
    int64_t sh = 1;
    double sx = 1e5;
    std::string sweight = "mollifier";
    sum->add_option("--k", sk)->capture_default_str();
    sum->add_option("--h", sh)->capture_default_str();
    sum->add_option("--x", sx)->capture_default_str();
    sum->add_option("--weight", sweight)->capture_default_str();
    sum->add_option("--threads", sthreads)->capture_default_str();
    sum->callback([&] {
        WeightPtr w;
        if ((code = make_weight(sweight, w))) return;
        double v = 0;
        const sc_status s = sc_direct_sum(sk, sh, sx, w.get(), sthreads, &v);
        if (s == SC_OK) print_value(v);
        code = exit_for(s);
    });

    auto* cs = app.add_subcommand("certain-sum", "sum w(r1 n/x) w(r2 n/x) d(r1 n + h) d(r2 n + h)");
    uint64_t cr1 = 2, cr2 = 3;
    int64_t ch = 1;
    double cx = 1e4;
    std::string cweight = "mollifier";
    cs->add_option("--r1", cr1)->capture_default_str();
    cs->add_option("--r2", cr2)->capture_default_str();
    cs->add_option("--h", ch)->capture_default_str();
    cs->add_option("--x", cx)->capture_default_str();
    cs->add_option("--weight", cweight)->capture_default_str();
    cs->callback([&] {
        WeightPtr w;
        if ((code = make_weight(cweight, w))) return;
        double v = 0;
        const sc_status s = sc_certain_sum(cr1, cr2, ch, cx, w.get(), w.get(), &v);
        if (s == SC_OK) print_value(v);
        code = exit_for(s);
    });

    auto* vp = app.add_subcommand("verify-partition", "Exhaustive grid check of the exponent partition cases");
    int resolution = 48, kmax = 5;
    std::string pdelta = "1/16";
    vp->add_option("--grid-resolution", resolution)->capture_default_str();
    vp->add_option("--kmax", kmax)->capture_default_str();
    vp->add_option("--delta", pdelta)->capture_default_str();
    vp->callback([&] {
        int passed = 0;
        sc_text* t = nullptr;
        const sc_status s = sc_verify_partition(resolution, kmax, pdelta.c_str(), &passed, &t);
        code = print_verification(s, passed, t);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    return code;
}
