"""Reference values derived with mpmath by ``make_oracles.py`` (50 digits, rounded)."""

FROZEN = {
    'sqrt_upper(3-0.004j)': complex(-1.73205119246884292, 0.0011547002817793314909),
    'sqrt_upper(-2)': complex(0.0, 1.4142135623730950488),
    'slit_forward(1+1j,0,1)': complex(0.78615137775742328607, 1.2720196495140689643),
    'slit_forward(-2+1e-6j,0,1)': complex(-1.7320508075689735186, 1.154700538379187379e-6),
    'slit_forward(0.3+0.2j,0.1,10)': complex(0.21845354521637791346, 0.33768512311668171395),
    'slit_inverse(2,0,1)': complex(2.2360679774997896964, 0.0),
    'compose_forward(0.2+0.5j,[0,0.3,-0.1],10)': complex(0.16129099388162991585, 0.72000141614594311562),
    'compose_forward(0,[0,1],1)': complex(0.0, 0.0),
    'push(1,0.5,4)': complex(0.2071067811865475244, 0.0),
    'point_mass_f1(2j)': complex(0.0, 2.4494897427831780982),
    'uniform_drift(0.3+0.7j,0.8)': complex(-0.25991666995190375328, 1.0151978720338823394),
    'theorem_uniform_flow(0.5+1j,t=1,n=1e4)': complex(0.35695818726854766398, 1.6106465121954469507),
    'tau_prediction(1e4,0.5)': complex(10715.786824902892624, 0.0),
    'tau_prediction(1e6,0.5)': complex(714385.78832685950824, 0.0),
    'hcap_single(n=1,y=1e3)': complex(0.50000012500006250004, 0.0),
}
