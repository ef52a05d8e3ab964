#include "app/cli.hpp"

int main(int argc, char** argv) { return hyperfuse::app::run_cli(argc, argv); }
