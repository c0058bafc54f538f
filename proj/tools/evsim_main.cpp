// Command-line front end: frame sequences in, event files / statistics /
// accumulation renders / benchmark tables out.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "evsim/bench.hpp"
#include "evsim/io.hpp"
#include "evsim/metrics.hpp"
#include "evsim/scenes.hpp"
#include "evsim/simulate.hpp"

namespace fs = std::filesystem;
using namespace evsim;

namespace {

bool verbose() {
  const char* env = std::getenv("EVSIM_VERBOSE");
  return env != nullptr && env[0] != '\0' && env[0] != '0';
}

void note(const std::string& msg) {
  if (verbose()) std::cerr << "[evsim] " << msg << "\n";
}

std::vector<std::string> collect_inputs(const std::string& input) {
  std::vector<std::string> paths;
  if (fs::is_directory(input)) {
    for (const auto& entry : fs::directory_iterator(input)) {
      if (!entry.is_regular_file()) continue;
      const std::string ext = entry.path().extension().string();
      if (ext == ".pgm" || ext == ".ppm" || ext == ".png") {
        paths.push_back(entry.path().string());
      }
    }
    std::sort(paths.begin(), paths.end());
  } else {
    paths.push_back(input);
  }
  if (paths.empty()) {
    throw std::runtime_error("no input images found in '" + input + "'");
  }
  return paths;
}

std::pair<int, int> parse_resolution(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) {
    throw std::runtime_error("resolution must look like 640x480, got '" + text + "'");
  }
  const int w = std::stoi(text.substr(0, x));
  const int h = std::stoi(text.substr(x + 1));
  if (w <= 0 || h <= 0) throw std::runtime_error("resolution must be positive");
  return {w, h};
}

bool is_binary_event_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("'" + path + "': cannot open");
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  return in.gcount() == 4 && std::string_view(magic, 4) == "EVS1";
}

const std::map<std::string, Method> kMethodNames = {
    {"difference_only", Method::difference_only},
    {"dense", Method::dense},
    {"sparse", Method::sparse},
    {"difference_interp", Method::difference_interp},
};

const std::map<std::string, FlowQuality> kPresetNames = {
    {"low_quality", FlowQuality::low_quality},
    {"high_quality", FlowQuality::high_quality},
};

struct SimulateArgs {
  std::string input;
  std::string output;
  Method method = Method::difference_only;
  double fps = 30.0;
  std::string resize;
  int c_pos = 0;
  int c_neg = 0;
  int n_interp = -1;
  FlowQuality preset = FlowQuality::low_quality;
  int selection_threshold = 0;
  bool magnitude = false;
  bool no_endpoints = false;
  std::string format = "auto";
};

int run_simulate(const SimulateArgs& args, bool c_pos_set, bool c_neg_set, bool n_interp_set) {
  FrameSource source;
  source.paths = collect_inputs(args.input);
  source.fps = args.fps;
  if (!args.resize.empty()) source.target_resolution = parse_resolution(args.resize);

  SimulatorConfig config = SimulatorConfig::defaults(args.method);
  if (c_pos_set) config.c_pos = args.c_pos;
  if (c_neg_set) config.c_neg = args.c_neg;
  if (n_interp_set) config.n_interp = args.n_interp;
  config.flow_preset = args.preset;
  if (args.selection_threshold > 0) config.selection_threshold = args.selection_threshold;
  if (args.magnitude) config.events_per_crossing = EventsPerCrossing::magnitude;
  if (args.no_endpoints) config.include_endpoints = false;
  config.validate();

  note("loading " + std::to_string(source.paths.size()) + " frames");
  const std::vector<Frame> frames = load_frames(source);

  Simulator sim(config);
  EventStream all{frames.front().width, frames.front().height, {}};
  for (const auto& frame : frames) {
    all.append(sim.push_frame(frame));
  }
  note("simulated " + std::to_string(all.events.size()) + " events");

  bool binary = args.format == "binary";
  if (args.format == "auto") {
    const std::string ext = fs::path(args.output).extension().string();
    binary = ext == ".evs" || ext == ".bin";
  }
  if (binary) {
    write_events_binary(all, args.output);
  } else {
    write_events_text(all, args.output);
  }
  return 0;
}

int run_stats(const std::string& input, const std::string& resolution, double duration) {
  EventStream stream;
  if (is_binary_event_file(input)) {
    stream = read_events_binary(input);
  } else {
    if (resolution.empty()) {
      throw std::runtime_error("text event files carry no resolution; pass --resolution WxH");
    }
    const auto [w, h] = parse_resolution(resolution);
    stream = read_events_text(input, w, h);
  }
  if (!resolution.empty()) {
    const auto [w, h] = parse_resolution(resolution);
    stream.width = w;
    stream.height = h;
  }

  if (duration <= 0.0) {
    duration = stream.events.empty()
                   ? 0.0
                   : static_cast<double>(stream.events.back().t) / 1e6;
  }

  if (stream.events.empty() || duration <= 0.0) {
    std::cout << "total_events " << stream.events.size() << "\nduration_s " << duration
              << "\nmean_rate 0\nstd_rate 0\n";
    return 0;
  }
  const EventRateStats stats = events_per_pixel_second(stream, duration);
  std::cout << "total_events " << stats.total_events << "\n"
            << "duration_s " << stats.duration << "\n"
            << "mean_rate " << stats.mean_rate << "\n"
            << "std_rate " << stats.std_rate << "\n";
  return 0;
}

int run_render(const std::string& input, const std::string& output_prefix, double fps) {
  if (fps <= 0.0) throw std::runtime_error("render: fps must be > 0");
  const EventStream stream = read_events_binary(input);
  if (stream.width <= 0 || stream.height <= 0) {
    throw std::runtime_error("render: event file has no resolution");
  }
  const time_us last = stream.events.empty() ? 0 : stream.events.back().t;
  int k = 0;
  for (;; ++k) {
    const time_us t0 = static_cast<time_us>(std::llround(k * 1e6 / fps));
    const time_us t1 = static_cast<time_us>(std::llround((k + 1) * 1e6 / fps));
    if (t0 > last) break;
    const AccumulatedFrame acc = accumulate(stream, t0, t1);
    char suffix[32];
    std::snprintf(suffix, sizeof(suffix), "_%05d.png", k);
    render_accumulated(acc, output_prefix + suffix);
    if (stream.events.empty()) break;
  }
  note("rendered " + std::to_string(k) + " accumulation windows");
  return 0;
}

int run_bench(const std::string& scene, int width, int height, int frames, int runs,
              const std::string& output) {
  const BenchScene s =
      scene == "low_dynamics" ? BenchScene::low_dynamics : BenchScene::high_dynamics;
  int w = width, h = height;
  if (w <= 0 || h <= 0) {
    // Defaults mirror the two capture setups the methods target.
    if (s == BenchScene::high_dynamics) {
      w = 640, h = 480;
    } else {
      w = 1280, h = 720;
    }
  }
  note(std::string("benchmarking scene ") + bench_scene_name(s));
  const auto rows = bench_suite(s, w, h, frames, runs);
  const std::string csv = bench_table_csv(rows);
  if (output.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(output);
    if (!out) throw std::runtime_error("'" + output + "': cannot open for writing");
    out << csv;
  }
  return 0;
}

int run_synth(const std::string& scene, const std::string& out_dir, int width, int height,
              int frames, double fps) {
  fs::create_directories(out_dir);
  std::vector<Frame> seq;
  if (scene == "square") {
    seq = scenes::translating_square(width, height, frames, 24, width / 4, height / 3, 3, 1, fps);
  } else if (scene == "ball") {
    seq = scenes::low_dynamics_scene(width, height, frames, fps);
  } else if (scene == "pan") {
    seq = scenes::high_dynamics_scene(width, height, frames, fps);
  } else if (scene == "dot") {
    seq = scenes::constant_velocity_dot(width, height, frames, 12.0, fps).frames;
  } else {
    throw std::runtime_error("unknown scene '" + scene + "' (square, ball, pan, dot)");
  }
  for (std::size_t k = 0; k < seq.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%05zu.pgm", k);
    write_frame(seq[k], (fs::path(out_dir) / name).string());
  }
  note("wrote " + std::to_string(seq.size()) + " frames to " + out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evsim: real-time event-camera simulation from frame sequences"};
  app.require_subcommand(1);

  // simulate
  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Convert a frame sequence to an event file");
  sim->add_option("-i,--input", sim_args.input, "Input image file or directory")->required();
  sim->add_option("-o,--output", sim_args.output, "Output event file")->required();
  sim->add_option("-m,--method", sim_args.method, "Simulation method")
      ->transform(CLI::CheckedTransformer(kMethodNames, CLI::ignore_case))
      ->default_str("difference_only");
  sim->add_option("--fps", sim_args.fps, "Input frame rate")->check(CLI::PositiveNumber);
  sim->add_option("--resize", sim_args.resize, "Resize input frames, e.g. 640x480");
  auto* opt_cpos = sim->add_option("--c-pos", sim_args.c_pos, "Positive threshold");
  auto* opt_cneg = sim->add_option("--c-neg", sim_args.c_neg, "Negative threshold");
  auto* opt_ninterp =
      sim->add_option("--n-interp", sim_args.n_interp, "Interpolated frames per interval");
  sim->add_option("--flow-preset", sim_args.preset, "Flow quality preset")
      ->transform(CLI::CheckedTransformer(kPresetNames, CLI::ignore_case));
  sim->add_option("--selection-threshold", sim_args.selection_threshold,
                  "Sparse pixel selection threshold (defaults to c_pos)");
  sim->add_flag("--magnitude", sim_args.magnitude,
                "Emit floor(|delta|/threshold) events per crossing instead of one");
  sim->add_flag("--no-endpoints", sim_args.no_endpoints,
                "Exclude the input frames from the difference chain");
  sim->add_option("--format", sim_args.format, "Output format: auto, text, binary")
      ->check(CLI::IsMember({"auto", "text", "binary"}));

  // stats
  std::string stats_input, stats_resolution;
  double stats_duration = 0.0;
  auto* stats = app.add_subcommand("stats", "Print event-rate statistics for an event file");
  stats->add_option("-i,--input", stats_input, "Event file (binary or text)")->required();
  stats->add_option("--resolution", stats_resolution, "Resolution WxH (required for text files)");
  stats->add_option("--duration", stats_duration,
                    "Duration in seconds (defaults to the last event timestamp)");

  // render
  std::string render_input, render_output;
  double render_fps = 30.0;
  auto* render = app.add_subcommand("render", "Render accumulated-event images per 1/fps window");
  render->add_option("-i,--input", render_input, "Binary event file")->required();
  render->add_option("-o,--output", render_output, "Output path prefix")->required();
  render->add_option("--fps", render_fps, "Accumulation windows per second")
      ->check(CLI::PositiveNumber);

  // bench
  std::string bench_scene = "high_dynamics", bench_output;
  int bench_width = 0, bench_height = 0, bench_frames = 20, bench_runs = 10;
  auto* bench = app.add_subcommand("bench", "Run the runtime benchmark suite");
  bench->add_option("--scene", bench_scene, "Scene: high_dynamics or low_dynamics")
      ->check(CLI::IsMember({"high_dynamics", "low_dynamics"}));
  bench->add_option("--width", bench_width, "Scene width (default per scene)");
  bench->add_option("--height", bench_height, "Scene height (default per scene)");
  bench->add_option("--frames", bench_frames, "Frames per run")->check(CLI::PositiveNumber);
  bench->add_option("--runs", bench_runs, "Timed runs per method")->check(CLI::PositiveNumber);
  bench->add_option("-o,--output", bench_output, "Write the CSV table here instead of stdout");

  // synth
  std::string synth_scene = "ball", synth_out;
  int synth_width = 640, synth_height = 480, synth_frames = 30;
  double synth_fps = 30.0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic test scene");
  synth->add_option("--scene", synth_scene, "Scene: square, ball, pan, dot")
      ->check(CLI::IsMember({"square", "ball", "pan", "dot"}));
  synth->add_option("-o,--output", synth_out, "Output directory")->required();
  synth->add_option("--width", synth_width, "Frame width")->check(CLI::PositiveNumber);
  synth->add_option("--height", synth_height, "Frame height")->check(CLI::PositiveNumber);
  synth->add_option("--frames", synth_frames, "Frame count")->check(CLI::PositiveNumber);
  synth->add_option("--fps", synth_fps, "Frame rate")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return run_simulate(sim_args, opt_cpos->count() > 0, opt_cneg->count() > 0,
                          opt_ninterp->count() > 0);
    }
    if (stats->parsed()) return run_stats(stats_input, stats_resolution, stats_duration);
    if (render->parsed()) return run_render(render_input, render_output, render_fps);
    if (bench->parsed()) {
      return run_bench(bench_scene, bench_width, bench_height, bench_frames, bench_runs,
                       bench_output);
    }
    if (synth->parsed()) {
      return run_synth(synth_scene, synth_out, synth_width, synth_height, synth_frames, synth_fps);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
