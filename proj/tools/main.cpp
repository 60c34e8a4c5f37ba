#include "admkit/cli.hpp"

int main(int argc, char** argv) { return admkit::run_cli(argc, argv); }
