#![allow(clippy::excessive_precision)]

// Gauss-Legendre nodes and weights on [-1, 1], nonnegative nodes only.
// Rule n uses the listed half; negative nodes mirror with equal weights.
pub(crate) static RULES: [&[(f64, f64)]; 12] = [
    &[(0.0, 2.0)],
    &[(5.77350269189625764509148780502e-1, 1.0)],
    &[
        (0.0, 8.88888888888888888888888888889e-1),
        (
            7.74596669241483377035853079956e-1,
            5.55555555555555555555555555556e-1,
        ),
    ],
    &[
        (
            3.39981043584856264802665759103e-1,
            6.52145154862546142626936050778e-1,
        ),
        (
            8.61136311594052575223946488893e-1,
            3.47854845137453857373063949222e-1,
        ),
    ],
    &[
        (0.0, 5.68888888888888888888888888889e-1),
        (
            5.384693101056830910363144207e-1,
            4.78628670499366468041291514836e-1,
        ),
        (
            9.06179845938663992797626878299e-1,
            2.3692688505618908751426404072e-1,
        ),
    ],
    &[
        (
            2.38619186083196908630501721681e-1,
            4.6791393457269104738987034399e-1,
        ),
        (
            6.6120938646626451366139959502e-1,
            3.60761573048138607569833513838e-1,
        ),
        (
            9.32469514203152027812301554494e-1,
            1.71324492379170345040296142173e-1,
        ),
    ],
    &[
        (0.0, 4.17959183673469387755102040816e-1),
        (
            4.05845151377397166906606412077e-1,
            3.81830050505118944950369775489e-1,
        ),
        (
            7.41531185599394439863864773281e-1,
            2.79705391489276667901467771424e-1,
        ),
        (
            9.49107912342758524526189684048e-1,
            1.29484966168869693270611432679e-1,
        ),
    ],
    &[
        (
            1.8343464249564980493947614236e-1,
            3.62683783378361982965150449277e-1,
        ),
        (
            5.25532409916328985817739049189e-1,
            3.13706645877887287337962201987e-1,
        ),
        (
            7.96666477413626739591553936476e-1,
            2.22381034453374470544355994426e-1,
        ),
        (
            9.60289856497536231683560868569e-1,
            1.0122853629037625915253135431e-1,
        ),
    ],
    &[
        (0.0, 3.30239355001259763164525069287e-1),
        (
            3.24253423403808929038538014643e-1,
            3.12347077040002840068630406584e-1,
        ),
        (
            6.13371432700590397308702039341e-1,
            2.60610696402935462318742869419e-1,
        ),
        (
            8.3603110732663579429942978807e-1,
            1.80648160694857404058472031243e-1,
        ),
        (
            9.68160239507626089835576202904e-1,
            8.12743883615744119718921581105e-2,
        ),
    ],
    &[
        (
            1.4887433898163121088482600113e-1,
            2.95524224714752870173892994651e-1,
        ),
        (
            4.33395394129247190799265943166e-1,
            2.69266719309996355091226921569e-1,
        ),
        (
            6.79409568299024406234327365115e-1,
            2.19086362515982043995534934228e-1,
        ),
        (
            8.65063366688984510732096688423e-1,
            1.49451349150580593145776339658e-1,
        ),
        (
            9.73906528517171720077964012084e-1,
            6.66713443086881375935688098933e-2,
        ),
    ],
    &[
        (0.0, 2.72925086777900630714483528336e-1),
        (
            2.69543155952344972331531985401e-1,
            2.62804544510246662180688869891e-1,
        ),
        (
            5.19096129206811815925725669459e-1,
            2.33193764591990479918523704843e-1,
        ),
        (
            7.30152005574049324093416252031e-1,
            1.86290210927734251426097641432e-1,
        ),
        (
            8.87062599768095299075157769304e-1,
            1.25580369464904624634694299224e-1,
        ),
        (
            9.78228658146056992803938001123e-1,
            5.56685671161736664827537204425e-2,
        ),
    ],
    &[
        (
            1.25233408511468915472441369464e-1,
            2.49147045813402785000562436043e-1,
        ),
        (
            3.67831498998180193752691536644e-1,
            2.33492536538354808760849898925e-1,
        ),
        (
            5.87317954286617447296702418941e-1,
            2.0316742672306592174906445581e-1,
        ),
        (
            7.69902674194304687036893833213e-1,
            1.60078328543346226334652529543e-1,
        ),
        (
            9.04117256370474856678465866119e-1,
            1.06939325995318430960254718194e-1,
        ),
        (
            9.81560634246719250690549090149e-1,
            4.7175336386511827194615961485e-2,
        ),
    ],
];
