#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eitfuse/dataset.hpp"
#include "eitfuse/error.hpp"
#include "eitfuse/guidance.hpp"
#include "eitfuse/jacobian.hpp"
#include "eitfuse/metrics.hpp"
#include "eitfuse/netpbm.hpp"
#include "eitfuse/parallel.hpp"
#include "eitfuse/phantoms.hpp"
#include "eitfuse/recon.hpp"

namespace eitfuse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Reproducibility record written beside the outputs of a run.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    json config = json::object();
    json seeds = json::object();
    json timings = json::object();
    std::vector<std::string> outputs;

    void write(const fs::path& path) const {
        json j{{"command", command}, {"argv", argv},     {"config", config},
               {"seeds", seeds},     {"timings", timings}, {"outputs", outputs}};
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path.string());
        out << j.dump(2) << '\n';
    }
};

fs::path manifest_beside(const fs::path& file) {
    fs::path p = file;
    p += ".run.json";
    return p;
}

std::array<int, 4> parse_counts(const std::string& text) {
    std::array<int, 4> out{};
    std::stringstream ss(text);
    std::string item;
    int k = 0;
    while (std::getline(ss, item, ',')) {
        if (k >= 4) throw InputError("--counts takes exactly four comma-separated integers");
        try {
            std::size_t used = 0;
            out[k] = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError("invalid count '" + item + "'");
        }
        ++k;
    }
    if (k != 4) throw InputError("--counts takes exactly four comma-separated integers");
    return out;
}

std::vector<NoiseLevel> parse_plan(const std::string& text) {
    std::vector<NoiseLevel> plan;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) plan.push_back(parse_noise_level(item));
    if (plan.empty()) throw InputError("noise plan must not be empty");
    return plan;
}

json plan_json(const std::vector<NoiseLevel>& plan) {
    json j = json::array();
    for (const auto& l : plan) {
        if (l) j.push_back(*l);
        else j.push_back("clean");
    }
    return j;
}

void write_frame_text(std::ostream& out, const MeasurementFrame& f) {
    out.imbue(std::locale::classic());
    out << std::setprecision(17);
    for (double v : f.values) out << v << '\n';
}

std::vector<int> select_rows(const fs::path& dataset_dir, const std::string& split, int n) {
    if (split == "all") {
        std::vector<int> all(n);
        for (int i = 0; i < n; ++i) all[i] = i;
        return all;
    }
    const auto s = load_splits(dataset_dir);
    if (split == "train") return s.train;
    if (split == "val") return s.val;
    if (split == "test") return s.test;
    throw InputError("unknown split '" + split + "'");
}

std::vector<PixelImage> read_image_rows(const fs::path& path) {
    const auto values = read_f32le(path);
    if (values.size() % kImagePixels != 0) {
        throw FormatError(path.string() + " does not hold whole 64x64 rows");
    }
    std::vector<PixelImage> out(values.size() / kImagePixels, PixelImage(kImageSide, kImageSide));
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (int p = 0; p < kImagePixels; ++p) out[i].data[p] = values[i * kImagePixels + p];
    }
    return out;
}

// ---- dataset gen -----------------------------------------------------------

struct DatasetGenArgs {
    std::string counts = "10,10,10,10";
    std::uint64_t seed = 0;
    std::string out;
    std::string noise_plan = "clean,50,40,30";
    std::string noise_domain = "normalized";
    double forward_h = 0.1;
    double jacobian_h = 0.2;
    std::uint64_t split_seed = 0;
    bool split_seed_set = false;
    double coverage = 0.5;
    double contact_impedance = 1e-5;
    int jobs = 1;
};

int run_dataset_gen(const DatasetGenArgs& a, const std::vector<std::string>& argv) {
    const auto t0 = Clock::now();
    DatasetConfig cfg;
    cfg.seed = a.seed;
    cfg.counts = parse_counts(a.counts);
    cfg.noise_plan = parse_plan(a.noise_plan);
    cfg.noise_domain = a.noise_domain == "raw" ? NoiseDomain::Raw : NoiseDomain::Normalized;
    cfg.forward_h_mm = a.forward_h;
    cfg.jacobian_h_mm = a.jacobian_h;
    cfg.geometry.electrode_coverage = a.coverage;
    cfg.geometry.contact_impedance = a.contact_impedance;
    const Dataset ds = generate_dataset(cfg, a.jobs);
    const double t_gen = seconds_since(t0);
    const fs::path dir(a.out);
    write_dataset(ds, dir);
    const std::uint64_t split_seed = a.split_seed_set ? a.split_seed : a.seed;
    write_splits(stratified_split(cfg, split_seed), dir);

    RunManifest m;
    m.command = "dataset gen";
    m.argv = argv;
    m.config = {{"counts", cfg.counts},
                {"noise_plan", plan_json(cfg.noise_plan)},
                {"noise_domain", a.noise_domain},
                {"forward_h_mm", cfg.forward_h_mm},
                {"jacobian_h_mm", cfg.jacobian_h_mm},
                {"electrode_coverage", cfg.geometry.electrode_coverage},
                {"contact_impedance", cfg.geometry.contact_impedance},
                {"jobs", a.jobs}};
    m.seeds = {{"dataset", cfg.seed}, {"split", split_seed}};
    m.timings = {{"generate_s", t_gen}, {"total_s", seconds_since(t0)}};
    m.outputs = {"manifest.json", "voltages.f32le", "truths.f32le", "masks.u8", "train.idx", "val.idx", "test.idx"};
    m.write(dir / "run_manifest.json");
    std::cout << "wrote " << ds.size() << " samples to " << dir.string() << '\n';
    return 0;
}

// ---- forward ---------------------------------------------------------------

struct ForwardArgs {
    std::uint64_t seed = 0;
    int objects = 1;
    int scaffold = 0;
    double h = 0.1;
    bool raw = false;
    std::string out;
};

int run_forward(const ForwardArgs& a, const std::vector<std::string>& argv) {
    const auto t0 = Clock::now();
    SensorGeometry geometry;
    const Mesh mesh = build_mesh(geometry, a.h);
    const PhantomScene scene =
        a.scaffold ? scaffold_scene(a.scaffold) : sample_phantom(a.seed, a.objects, geometry);
    const auto v1 = extract_frame(full_forward(mesh, rasterize_field(scene, mesh), geometry, geometry.current));
    MeasurementFrame frame = v1;
    if (!a.raw) {
        const auto v0 = extract_frame(full_forward(
            mesh, ConductivityField::uniform(mesh.element_count(), kBackgroundConductivity), geometry,
            geometry.current));
        frame = normalized_difference(v1, v0);
    }
    if (a.out.empty()) {
        write_frame_text(std::cout, frame);
        return 0;
    }
    {
        std::ofstream out(a.out, std::ios::binary);
        if (!out) throw Error("cannot write " + a.out);
        write_frame_text(out, frame);
    }
    RunManifest m;
    m.command = "forward";
    m.argv = argv;
    m.config = {{"objects", a.objects}, {"scaffold", a.scaffold}, {"h_mm", a.h}, {"raw", a.raw}};
    m.seeds = {{"phantom", a.seed}};
    m.timings = {{"total_s", seconds_since(t0)}};
    m.outputs = {a.out};
    m.write(manifest_beside(a.out));
    return 0;
}

// ---- recon -----------------------------------------------------------------

struct ReconArgs {
    std::string dataset;
    std::string method = "tikhonov";
    double lambda = 0.0;  // <= 0: automatic
    double gamma = -1.0;  // < 0: equal to lambda
    std::string mask;
    std::string out;
    double jacobian_h = 0.0;  // <= 0: from manifest
    int jobs = 1;
};

int run_recon(const ReconArgs& a, const std::vector<std::string>& argv) {
    const auto t0 = Clock::now();
    const Dataset ds = load_dataset(a.dataset);
    const auto& cfg = ds.config;
    const double jh = a.jacobian_h > 0.0 ? a.jacobian_h : cfg.jacobian_h_mm;
    const Mesh mesh = build_mesh(cfg.geometry, jh);
    const PixelGrid grid{kImageSide, cfg.geometry.radius_mm};
    const SensitivityMatrix J = jacobian(
        mesh, ConductivityField::uniform(mesh.element_count(), kBackgroundConductivity), cfg.geometry,
        cfg.geometry.current, grid);
    const double t_jac = seconds_since(t0);
    const double lambda = a.lambda > 0.0 ? a.lambda : default_lambda(J);
    const double gamma = a.gamma >= 0.0 ? a.gamma : lambda;

    std::vector<std::uint8_t> masks = ds.masks;
    if (!a.mask.empty()) {
        masks = read_bytes(a.mask);
        if (masks.size() != ds.masks.size()) throw FormatError("size mismatch in mask file " + a.mask);
    }

    const int n = ds.size();
    std::vector<float> pred(static_cast<std::size_t>(n) * kImagePixels, 0.0f);
    auto store = [&](int i, const PixelImage& img) {
        for (int p = 0; p < kImagePixels; ++p) pred[static_cast<std::size_t>(i) * kImagePixels + p] = static_cast<float>(img.data[p]);
    };
    if (a.method == "tikhonov") {
        const TikhonovGL solver(J, lambda);
        parallel_for(static_cast<std::size_t>(n), a.jobs,
                     [&](std::size_t i) { store(static_cast<int>(i), solver.reconstruct(ds.frame(static_cast<int>(i)))); });
    } else if (a.method == "cg") {
        parallel_for(static_cast<std::size_t>(n), a.jobs, [&](std::size_t i) {
            MaskImage m(kImageSide, kImageSide);
            std::copy_n(masks.begin() + static_cast<std::ptrdiff_t>(i) * kImagePixels, kImagePixels, m.data.begin());
            store(static_cast<int>(i), cg_recon(J, ds.frame(static_cast<int>(i)), m, lambda, gamma));
        });
    } else {
        throw InputError("unknown method '" + a.method + "'");
    }
    write_f32le(a.out, pred);

    RunManifest m;
    m.command = "recon";
    m.argv = argv;
    m.config = {{"dataset", a.dataset}, {"method", a.method}, {"lambda", lambda}, {"gamma", gamma},
                {"mask", a.mask.empty() ? "dataset" : a.mask}, {"jacobian_h_mm", jh}, {"jobs", a.jobs}};
    m.seeds = {{"dataset", cfg.seed}};
    m.timings = {{"jacobian_s", t_jac}, {"total_s", seconds_since(t0)}};
    m.outputs = {a.out};
    m.write(manifest_beside(a.out));
    return 0;
}

// ---- guidance --------------------------------------------------------------

struct GuidanceArgs {
    std::string input;
    std::string out;
    std::string gray_out;
    double beta = 0.5;
    std::string invert = "auto";
    int theta = 0;
};

int run_guidance_cmd(const GuidanceArgs& a, const std::vector<std::string>& argv) {
    const auto t0 = Clock::now();
    const RgbImage img = read_ppm(a.input);
    if (img.rows != kGuidanceSide || img.cols != kGuidanceSide) {
        throw InputError("guidance image must be 406x406, got " + std::to_string(img.cols) + "x" +
                         std::to_string(img.rows));
    }
    GuidanceOptions opt;
    opt.beta = a.beta;
    opt.polarity = a.invert == "on" ? Polarity::Invert : a.invert == "off" ? Polarity::Keep : Polarity::Auto;
    if (a.theta > 0) opt.theta_deg = a.theta;
    const GuidanceResult res = run_guidance(img, opt);
    write_mask_pgm(a.out, res.mask);
    std::vector<std::string> outputs{a.out};
    if (!a.gray_out.empty()) {
        write_gray_pgm16(a.gray_out, res.invariant);
        outputs.push_back(a.gray_out);
    }
    RunManifest m;
    m.command = "guidance";
    m.argv = argv;
    m.config = {{"input", a.input}, {"beta", a.beta}, {"invert", a.invert},
                {"theta_deg", res.theta_deg}, {"theta_pinned", a.theta > 0}, {"inverted", res.inverted}};
    m.timings = {{"total_s", seconds_since(t0)}};
    m.outputs = outputs;
    m.write(manifest_beside(a.out));
    std::cout << "theta " << res.theta_deg << " inverted " << (res.inverted ? "yes" : "no") << '\n';
    return 0;
}

struct SynthArgs {
    std::uint64_t seed = 0;
    int objects = 2;
    double shade = 0.2;
    double noise = 1.5;
    std::string out;
    std::string mask_out;
};

int run_synth(const SynthArgs& a, const std::vector<std::string>& argv) {
    SensorGeometry geometry;
    const PhantomScene scene = sample_phantom(a.seed, a.objects, geometry);
    GuidanceStyle style;
    style.noise_sigma = a.noise;
    write_ppm(a.out, synth_guidance(scene, geometry.radius_mm, a.seed, a.shade, style));
    std::vector<std::string> outputs{a.out};
    if (!a.mask_out.empty()) {
        write_mask_pgm(a.mask_out, mask_image(scene, PixelGrid{kImageSide, geometry.radius_mm}));
        outputs.push_back(a.mask_out);
    }
    RunManifest m;
    m.command = "synth-guidance";
    m.argv = argv;
    m.config = {{"objects", a.objects}, {"shade", a.shade}, {"noise_sigma", a.noise}};
    m.seeds = {{"phantom", a.seed}, {"render", a.seed}};
    m.outputs = outputs;
    m.write(manifest_beside(a.out));
    return 0;
}

// ---- metrics ---------------------------------------------------------------

struct MetricsArgs {
    std::string pred;
    std::string truth;
    std::string split = "all";
    std::string out;
};

int run_metrics(const MetricsArgs& a, const std::vector<std::string>& argv) {
    const auto preds = read_image_rows(a.pred);
    std::vector<PixelImage> truths;
    std::vector<int> rows;
    if (fs::is_directory(a.truth)) {
        const Dataset ds = load_dataset(a.truth);
        if (static_cast<int>(preds.size()) != ds.size()) {
            throw FormatError("prediction file holds " + std::to_string(preds.size()) + " rows for " +
                              std::to_string(ds.size()) + " samples");
        }
        rows = select_rows(a.truth, a.split, ds.size());
        for (int i : rows) truths.push_back(ds.truth(i));
    } else {
        if (a.split != "all") throw InputError("--split needs a dataset directory as --truth");
        truths = read_image_rows(a.truth);
        if (truths.size() != preds.size()) throw FormatError("prediction and truth row counts differ");
        for (std::size_t i = 0; i < preds.size(); ++i) rows.push_back(static_cast<int>(i));
    }
    std::vector<PixelImage> selected;
    for (int i : rows) selected.push_back(preds.at(static_cast<std::size_t>(i)));
    MetricReport rep = evaluate_batch(selected, truths);
    rep.samples = rows;
    if (a.out.empty()) {
        write_report_csv(rep, std::cout);
        return 0;
    }
    {
        std::ofstream out(a.out, std::ios::binary);
        if (!out) throw Error("cannot write " + a.out);
        write_report_csv(rep, out);
    }
    RunManifest m;
    m.command = "metrics";
    m.argv = argv;
    m.config = {{"pred", a.pred}, {"truth", a.truth}, {"split", a.split}, {"rows", rows.size()},
                {"mean_rie", rep.mean_rie}, {"mean_mssim", rep.mean_mssim}};
    m.outputs = {a.out};
    m.write(manifest_beside(a.out));
    return 0;
}

// ---- render ----------------------------------------------------------------

struct RenderArgs {
    std::string input;
    std::string kind = "auto";
    int index = 0;
    std::string palette = "gray";
    double lo = -0.2;
    double hi = 1.0;
    std::string out;
};

int run_render(const RenderArgs& a, const std::vector<std::string>& argv) {
    std::string kind = a.kind;
    if (kind == "auto") kind = fs::path(a.input).extension() == ".u8" ? "mask" : "image";
    if (!(a.hi > a.lo)) throw InputError("--max must exceed --min");
    if (kind == "mask") {
        const auto bytes = read_bytes(a.input);
        const std::size_t off = static_cast<std::size_t>(a.index) * kImagePixels;
        if (a.index < 0 || off + kImagePixels > bytes.size()) throw InputError("--index out of range");
        MaskImage mask(kImageSide, kImageSide);
        std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(off), kImagePixels, mask.data.begin());
        render_mask(mask, a.out);
    } else if (kind == "image") {
        const auto rows = read_image_rows(a.input);
        if (a.index < 0 || a.index >= static_cast<int>(rows.size())) throw InputError("--index out of range");
        render_image(rows[a.index], a.palette == "signed" ? Palette::Signed : Palette::Gray, {a.lo, a.hi}, a.out);
    } else {
        throw InputError("unknown kind '" + kind + "'");
    }
    RunManifest m;
    m.command = "render";
    m.argv = argv;
    m.config = {{"input", a.input}, {"kind", kind}, {"index", a.index}, {"palette", a.palette},
                {"clamp", {a.lo, a.hi}},
                {"mapping", a.palette == "signed"
                                ? "white at 0, linear to blue (0,0,255) at min and red (255,0,0) at max"
                                : "byte = round(255 * (clamp(v, min, max) - min) / (max - min))"}};
    m.outputs = {a.out};
    m.write(manifest_beside(a.out));
    return 0;
}

// ---- scaffold-demo ---------------------------------------------------------

struct ScaffoldArgs {
    int variant = 1;
    std::string out;
    double forward_h = 0.1;
    double jacobian_h = 0.2;
    std::string snr = "50";
    std::uint64_t seed = 0;
    double lambda = 0.0;
    double gamma = -1.0;
};

int run_scaffold(const ScaffoldArgs& a, const std::vector<std::string>& argv) {
    const auto t0 = Clock::now();
    SensorGeometry geometry;
    const PixelGrid grid{kImageSide, geometry.radius_mm};
    const PhantomScene scene = scaffold_scene(a.variant);
    const Mesh fine = build_mesh(geometry, a.forward_h);
    const Mesh coarse = build_mesh(geometry, a.jacobian_h);
    const auto v0 = extract_frame(full_forward(
        fine, ConductivityField::uniform(fine.element_count(), kBackgroundConductivity), geometry, geometry.current));
    const auto v1 = extract_frame(full_forward(fine, rasterize_field(scene, fine), geometry, geometry.current));
    const MeasurementFrame dv = add_noise(normalized_difference(v1, v0), parse_noise_level(a.snr), a.seed);
    const SensitivityMatrix J = jacobian(
        coarse, ConductivityField::uniform(coarse.element_count(), kBackgroundConductivity), geometry,
        geometry.current, grid);
    const double lambda = a.lambda > 0.0 ? a.lambda : default_lambda(J);
    const double gamma = a.gamma >= 0.0 ? a.gamma : lambda;

    const PixelImage truth = truth_image(scene, grid);
    const MaskImage mask = mask_image(scene, grid);
    const PixelImage x_tr = treg_gl(J, dv, lambda);
    const PixelImage x_cg = cg_recon(J, dv, mask, lambda, gamma);
    const MetricReport rep = evaluate_batch({x_tr, x_cg}, {truth, truth});

    const fs::path dir(a.out);
    fs::create_directories(dir);
    render_image(truth, Palette::Gray, {}, (dir / "truth.pgm").string());
    render_mask(mask, (dir / "mask.pgm").string());
    render_image(x_tr, Palette::Signed, {}, (dir / "tikhonov.ppm").string());
    render_image(x_cg, Palette::Signed, {}, (dir / "cg.ppm").string());
    {
        std::ofstream out(dir / "report.csv", std::ios::binary);
        out.imbue(std::locale::classic());
        out << std::setprecision(10) << "method,rie,mssim\n"
            << "tikhonov," << rep.rie[0] << ',' << rep.mssim[0] << '\n'
            << "cg," << rep.rie[1] << ',' << rep.mssim[1] << '\n';
    }
    RunManifest m;
    m.command = "scaffold-demo";
    m.argv = argv;
    m.config = {{"variant", a.variant}, {"forward_h_mm", a.forward_h}, {"jacobian_h_mm", a.jacobian_h},
                {"snr", a.snr}, {"lambda", lambda}, {"gamma", gamma}, {"display_clamp", {-0.2, 1.0}}};
    m.seeds = {{"noise", a.seed}};
    m.timings = {{"total_s", seconds_since(t0)}};
    m.outputs = {"truth.pgm", "mask.pgm", "tikhonov.ppm", "cg.ppm", "report.csv"};
    m.write(dir / "run_manifest.json");
    std::cout << std::setprecision(6) << "tikhonov rie " << rep.rie[0] << " mssim " << rep.mssim[0] << '\n'
              << "cg       rie " << rep.rie[1] << " mssim " << rep.mssim[1] << '\n';
    return 0;
}

// ---- mesh export -----------------------------------------------------------

struct MeshArgs {
    double h = 0.7;
    double coverage = 0.5;
    std::string out;
};

int run_mesh(const MeshArgs& a) {
    SensorGeometry geometry;
    geometry.electrode_coverage = a.coverage;
    const Mesh mesh = build_mesh(geometry, a.h);
    if (a.out.empty()) export_mesh(mesh, std::cout);
    else export_mesh(mesh, a.out);
    return 0;
}

}  // namespace

std::vector<std::uint8_t> gray_bytes(const PixelImage& img, ClampRange range) {
    std::vector<std::uint8_t> out(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = std::clamp(img.data[i], range.lo, range.hi);
        out[i] = static_cast<std::uint8_t>(std::lround(255.0 * (v - range.lo) / (range.hi - range.lo)));
    }
    return out;
}

std::vector<std::uint8_t> signed_rgb(const PixelImage& img, ClampRange range) {
    std::vector<std::uint8_t> out(img.size() * 3);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = std::clamp(img.data[i], range.lo, range.hi);
        double r = 255.0, g = 255.0, b = 255.0;
        if (v > 0.0 && range.hi > 0.0) {
            const double t = v / range.hi;
            g = b = 255.0 * (1.0 - t);
        } else if (v < 0.0 && range.lo < 0.0) {
            const double t = v / range.lo;
            r = g = 255.0 * (1.0 - t);
        }
        out[3 * i] = static_cast<std::uint8_t>(std::lround(r));
        out[3 * i + 1] = static_cast<std::uint8_t>(std::lround(g));
        out[3 * i + 2] = static_cast<std::uint8_t>(std::lround(b));
    }
    return out;
}

void render_image(const PixelImage& img, Palette palette, ClampRange range, const std::string& path) {
    if (palette == Palette::Gray) {
        write_pgm8(path, img.rows, img.cols, gray_bytes(img, range));
        return;
    }
    RgbImage rgb(img.rows, img.cols);
    rgb.rgb = signed_rgb(img, range);
    write_ppm(path, rgb);
}

void render_mask(const MaskImage& mask, const std::string& path) { write_mask_pgm(path, mask); }

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"Impedance-optical dual-modal EIT simulation and reconstruction toolkit", "eitfuse"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    auto* dataset = app.add_subcommand("dataset", "Dataset generation and validation");
    dataset->require_subcommand(1);

    DatasetGenArgs gen;
    auto* gen_cmd = dataset->add_subcommand("gen", "Simulate samples, split them and write a dataset directory");
    gen_cmd->add_option("--counts", gen.counts, "Samples with 1,2,3,4 objects")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Dataset seed; sample i uses seed+i")->capture_default_str();
    gen_cmd->add_option("--out", gen.out, "Output directory")->required();
    gen_cmd->add_option("--noise-plan", gen.noise_plan, "Comma-separated SNR levels in dB or 'clean', cycled over samples")->capture_default_str();
    gen_cmd->add_option("--noise-domain", gen.noise_domain, "Inject noise on the normalized frame or on raw voltages")
        ->check(CLI::IsMember({"normalized", "raw"}))->capture_default_str();
    gen_cmd->add_option("--forward-h", gen.forward_h, "Forward mesh edge length (mm)")->capture_default_str();
    gen_cmd->add_option("--jacobian-h", gen.jacobian_h, "Reconstruction mesh edge length (mm)")->capture_default_str();
    auto* split_opt = gen_cmd->add_option("--split-seed", gen.split_seed, "Split shuffle seed (defaults to --seed)")->capture_default_str();
    gen_cmd->add_option("--coverage", gen.coverage, "Electrode fraction of the circumference")->capture_default_str();
    gen_cmd->add_option("--contact-impedance", gen.contact_impedance, "Contact impedance (Ohm m^2)")->capture_default_str();
    gen_cmd->add_option("--jobs", gen.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

    std::string check_dir;
    auto* check_cmd = dataset->add_subcommand("check", "Validate a dataset directory");
    check_cmd->add_option("--dir", check_dir, "Dataset directory")->required();

    ForwardArgs fwd;
    auto* fwd_cmd = app.add_subcommand("forward", "Simulate one phantom and print its 104-value frame");
    fwd_cmd->add_option("--seed", fwd.seed, "Phantom seed")->capture_default_str();
    fwd_cmd->add_option("--objects", fwd.objects, "Number of inclusions")->check(CLI::Range(1, 4))->capture_default_str();
    fwd_cmd->add_option("--scaffold", fwd.scaffold, "Use scaffold scene variant 1 or 2 instead (0 = off)")->check(CLI::Range(0, 2))->capture_default_str();
    fwd_cmd->add_option("--mesh-h", fwd.h, "Mesh edge length (mm)")->capture_default_str();
    fwd_cmd->add_flag("--raw", fwd.raw, "Print raw voltages instead of the normalized difference");
    fwd_cmd->add_option("--out", fwd.out, "Write the frame to a file instead of stdout");

    ReconArgs rec;
    auto* rec_cmd = app.add_subcommand("recon", "Batch reconstruction of a dataset into predictions.f32le");
    rec_cmd->add_option("--dataset", rec.dataset, "Dataset directory")->required();
    rec_cmd->add_option("--method", rec.method, "Reconstruction method")->check(CLI::IsMember({"tikhonov", "cg"}))->capture_default_str();
    rec_cmd->add_option("--lambda", rec.lambda, "Tikhonov weight (<= 0: tr(J'J)/tr(L'L))")->capture_default_str();
    rec_cmd->add_option("--gamma", rec.gamma, "Cross-gradient weight (< 0: equal to lambda)")->capture_default_str();
    rec_cmd->add_option("--mask", rec.mask, "Mask file (N x 4096 bytes) overriding the dataset masks");
    rec_cmd->add_option("--out", rec.out, "Predictions file")->required();
    rec_cmd->add_option("--jacobian-h", rec.jacobian_h, "Override the manifest reconstruction mesh (mm; <= 0: manifest)")->capture_default_str();
    rec_cmd->add_option("--jobs", rec.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

    GuidanceArgs gd;
    auto* gd_cmd = app.add_subcommand("guidance", "Convert a 406x406 PPM guidance image into a 64x64 mask PGM");
    gd_cmd->add_option("--input", gd.input, "Guidance image (P6)")->required();
    gd_cmd->add_option("--out", gd.out, "Mask output (P5, 0/255)")->required();
    gd_cmd->add_option("--gray-out", gd.gray_out, "Optional 16-bit PGM of the invariant image");
    gd_cmd->add_option("--beta", gd.beta, "Threshold on the min-max normalized invariant image")->capture_default_str();
    gd_cmd->add_option("--invert", gd.invert, "Foreground polarity")->check(CLI::IsMember({"auto", "on", "off"}))->capture_default_str();
    gd_cmd->add_option("--theta", gd.theta, "Pinned projection angle in degrees (0: entropy search)")->check(CLI::Range(0, 180))->capture_default_str();

    SynthArgs sy;
    auto* sy_cmd = app.add_subcommand("synth-guidance", "Render a synthetic guidance image for a random phantom");
    sy_cmd->add_option("--seed", sy.seed, "Phantom and render seed")->capture_default_str();
    sy_cmd->add_option("--objects", sy.objects, "Number of inclusions")->check(CLI::Range(1, 4))->capture_default_str();
    sy_cmd->add_option("--shade", sy.shade, "Relative illumination gradient")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    sy_cmd->add_option("--noise", sy.noise, "Channel noise standard deviation (8-bit units)")->capture_default_str();
    sy_cmd->add_option("--out", sy.out, "PPM output")->required();
    sy_cmd->add_option("--mask-out", sy.mask_out, "Ground-truth mask PGM");

    MetricsArgs mt;
    auto* mt_cmd = app.add_subcommand("metrics", "RIE / MSSIM report as CSV");
    mt_cmd->add_option("--pred", mt.pred, "Predictions (N x 4096 float32 LE)")->required();
    mt_cmd->add_option("--truth", mt.truth, "Dataset directory or truth array file")->required();
    mt_cmd->add_option("--split", mt.split, "Rows to evaluate")->check(CLI::IsMember({"all", "train", "val", "test"}))->capture_default_str();
    mt_cmd->add_option("--out", mt.out, "CSV output (stdout when omitted)");

    RenderArgs rd;
    auto* rd_cmd = app.add_subcommand("render", "Render one array row as PGM/PPM");
    rd_cmd->add_option("--input", rd.input, "Image rows (.f32le) or masks (.u8)")->required();
    rd_cmd->add_option("--kind", rd.kind, "Row type")->check(CLI::IsMember({"auto", "image", "mask"}))->capture_default_str();
    rd_cmd->add_option("--index", rd.index, "Row index")->capture_default_str();
    rd_cmd->add_option("--palette", rd.palette, "Color mapping for images")->check(CLI::IsMember({"gray", "signed"}))->capture_default_str();
    rd_cmd->add_option("--min", rd.lo, "Lower display clamp")->capture_default_str();
    rd_cmd->add_option("--max", rd.hi, "Upper display clamp")->capture_default_str();
    rd_cmd->add_option("--out", rd.out, "Output file")->required();

    ScaffoldArgs sc;
    auto* sc_cmd = app.add_subcommand("scaffold-demo", "End-to-end run on the scaffold cell-growth scenes");
    sc_cmd->add_option("--variant", sc.variant, "1: one cluster, 2: two clusters")->check(CLI::Range(1, 2))->capture_default_str();
    sc_cmd->add_option("--out", sc.out, "Output directory")->required();
    sc_cmd->add_option("--forward-h", sc.forward_h, "Forward mesh edge length (mm)")->capture_default_str();
    sc_cmd->add_option("--jacobian-h", sc.jacobian_h, "Reconstruction mesh edge length (mm)")->capture_default_str();
    sc_cmd->add_option("--snr", sc.snr, "SNR in dB or 'clean'")->capture_default_str();
    sc_cmd->add_option("--seed", sc.seed, "Noise seed")->capture_default_str();
    sc_cmd->add_option("--lambda", sc.lambda, "Tikhonov weight (<= 0: automatic)")->capture_default_str();
    sc_cmd->add_option("--gamma", sc.gamma, "Cross-gradient weight (< 0: equal to lambda)")->capture_default_str();

    auto* mesh_cmd = app.add_subcommand("mesh", "Mesh utilities");
    mesh_cmd->require_subcommand(1);
    MeshArgs ms;
    auto* export_cmd = mesh_cmd->add_subcommand("export", "Write the sensor mesh as a text listing");
    export_cmd->add_option("--mesh-h", ms.h, "Edge length (mm)")->capture_default_str();
    export_cmd->add_option("--coverage", ms.coverage, "Electrode fraction of the circumference")->capture_default_str();
    export_cmd->add_option("--out", ms.out, "Output file (stdout when omitted)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*gen_cmd) {
            gen.split_seed_set = split_opt->count() > 0;
            return run_dataset_gen(gen, args);
        }
        if (*check_cmd) {
            const Dataset ds = load_dataset(check_dir);
            const auto s = load_splits(check_dir);
            std::cout << "ok: " << ds.size() << " samples, " << s.train.size() << " train, " << s.val.size()
                      << " val, " << s.test.size() << " test\n";
            return 0;
        }
        if (*fwd_cmd) return run_forward(fwd, args);
        if (*rec_cmd) return run_recon(rec, args);
        if (*gd_cmd) return run_guidance_cmd(gd, args);
        if (*sy_cmd) return run_synth(sy, args);
        if (*mt_cmd) return run_metrics(mt, args);
        if (*rd_cmd) return run_render(rd, args);
        if (*sc_cmd) return run_scaffold(sc, args);
        if (*export_cmd) return run_mesh(ms);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace eitfuse::cli
