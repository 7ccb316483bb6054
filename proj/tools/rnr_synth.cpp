#include <cstdio>
#include <fstream>

#include <CLI11.hpp>

#include "rnr/synthetic.hpp"

// Writes a clustered synthetic rating log in the delimited format, handy for
// trying the trainer without a real dataset.
int main(int argc, char** argv) {
  rnr::SynthConfig cfg;
  std::string out = "synthetic.csv";

  CLI::App app{"Synthetic rating-log generator"};
  app.add_option("--users", cfg.users);
  app.add_option("--items", cfg.items);
  app.add_option("--events-per-user", cfg.events_per_user);
  app.add_option("--clusters", cfg.clusters);
  app.add_option("--seed", cfg.seed);
  app.add_option("--out", out, "output csv path");
  CLI11_PARSE(app, argc, argv);

  const auto log = rnr::synthetic_log(cfg);
  std::ofstream file(out, std::ios::trunc);
  if (!file) {
    std::fprintf(stderr, "cannot open '%s'\n", out.c_str());
    return 1;
  }
  for (const auto& inter : log) {
    file << inter.user << ',' << inter.item << ',' << inter.rating << ','
         << inter.timestamp << '\n';
  }
  std::printf("wrote %zu interactions to %s\n", log.size(), out.c_str());
  return 0;
}
