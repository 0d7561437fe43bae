from src.oracle import run_oracle

params = {
    'ring': 'F_3',
    'stab_levels': 1,
    'max_states': 200000,
    'output_dir': 'runs',
    'run_name': 'example_f3_oracle'
}

report = run_oracle(params)
print(report.summary())

# The report and parameters.json are written to runs/example_f3_oracle/.
# Other rings: 'F_5', 'Z/9' (2 must be a unit, at most 9 elements).
