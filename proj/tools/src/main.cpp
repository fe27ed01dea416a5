#include "commands.hpp"

int main(int argc, char** argv) { return amfg::cli::run(argc, argv); }
