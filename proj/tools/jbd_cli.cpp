#include "jbd/cli.hpp"

int main(int argc, char** argv) { return jbd::cli_main(argc, argv); }
