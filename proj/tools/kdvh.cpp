#include "kdvh/cli.hpp"

int main(int argc, char** argv) { return kdvh::cli::run(argc, argv); }
