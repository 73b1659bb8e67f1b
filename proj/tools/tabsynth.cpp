#include "tabsynth/cli.hpp"

int main(int argc, char** argv) { return tabsynth::run_command(argc, argv); }
