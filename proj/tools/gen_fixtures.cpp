// Regenerates the canonical MDP fixture files from the environment builders.
#include <filesystem>
#include <iostream>

#include "rlgogar/envs.hpp"
#include "rlgogar/mdp_io.hpp"

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "fixtures";
  std::filesystem::create_directories(dir);
  const auto put = [&](const rlgogar::Mdp& m) {
    const std::string path = dir + "/" + m.name + ".mdp";
    rlgogar::save_mdp(m, path);
    std::cout << "wrote " << path << '\n';
  };
  put(rlgogar::make_chain(3, 0.9));
  put(rlgogar::make_random_walk(5, 0.9, 0.1));
  put(rlgogar::make_gridworld(4, 4, 0.9));
  return 0;
}
