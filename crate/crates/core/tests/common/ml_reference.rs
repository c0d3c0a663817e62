//! Mittag-Leffler values frozen from tests/oracles/ml_reference.py.
#![allow(clippy::excessive_precision)]

pub const ML_REFERENCE: &[(f64, f64, f64, f64)] = &[
    (0.3, 1.0, -0.5, 6.3264900594359902246e-1),
    (0.3, 1.0, -2.0, 2.9023222616787535504e-1),
    (0.3, 1.0, -5.0, 1.3708086902027063889e-1),
    (0.3, 1.0, -12.0, 6.1135915996519465044e-2),
    (0.3, 1.0, -30.0, 2.5182617502927663383e-2),
    (0.3, 1.0, -50.0, 1.5228201501814695234e-2),
    (0.3, 1.0, -1000.0, 7.6993246495257769278e-4),
    (0.3, 1.0, 1.5, 1.5807887059078352601e+2),
    (0.3, 1.0, 6.0, 9.6076057178949999556e+170),
    (0.3, 0.3, -0.5, 1.437565001472212678e-1),
    (0.3, 0.3, -2.0, 3.206239921884749485e-2),
    (0.3, 0.3, -5.0, 7.275100803154911655e-3),
    (0.3, 0.3, -12.0, 1.4536868521356201179e-3),
    (0.3, 0.3, -30.0, 2.4690078959965227566e-4),
    (0.3, 0.3, -50.0, 9.0297795269851063585e-5),
    (0.3, 0.3, -1000.0, 2.3084455544850575396e-7),
    (0.3, 0.3, 1.5, 4.0904757535459081567e+2),
    (0.3, 0.3, 6.0, 6.28494415120757553e+172),
    (0.3, -0.7, -0.5, -1.3133544199577227412e-1),
    (0.3, -0.7, -2.0, -3.6329825996129239292e-2),
    (0.3, -0.7, -5.0, -8.9324282432791169998e-3),
    (0.3, -0.7, -12.0, -1.846158652766416265e-3),
    (0.3, -0.7, -30.0, -3.1804256809871552463e-4),
    (0.3, -0.7, -50.0, -1.1674759063890711719e-4),
    (0.3, -0.7, -1000.0, -3.0001683067367937311e-7),
    (0.3, -0.7, 1.5, 1.5795617588925316586e+3),
    (0.3, -0.7, 6.0, 2.4668283114631865913e+175),
    (0.3, 0.5, -0.5, 3.0363310176042706703e-1),
    (0.3, 0.5, -2.0, 1.110854803064770455e-1),
    (0.3, 0.5, -5.0, 4.5519369411852957386e-2),
    (0.3, 0.5, -12.0, 1.8657674305523082091e-2),
    (0.3, 0.5, -30.0, 7.3551451503853048081e-3),
    (0.3, 0.5, -50.0, 4.3918174370267184428e-3),
    (0.3, 0.5, -1000.0, 2.1791819371576021156e-4),
    (0.3, 0.5, 1.5, 3.1203437906780895906e+2),
    (0.3, 0.5, 6.0, 1.9034169069931995303e+172),
    (0.3, 1.7, -0.5, 7.5216541672501623105e-1),
    (0.3, 1.7, -2.0, 3.7979411841557285835e-1),
    (0.3, 1.7, 1.5, 6.0051930175006391745e+1),
    (0.3, 1.7, 6.0, 1.4686858850256169216e+169),
    (0.5, 1.0, -0.5, 6.1569034419292587487e-1),
    (0.5, 1.0, -2.0, 2.5539567631050574387e-1),
    (0.5, 1.0, -5.0, 1.1070463773306862637e-1),
    (0.5, 1.0, -12.0, 4.685422101489376262e-2),
    (0.5, 1.0, -30.0, 1.8795888861416751497e-2),
    (0.5, 1.0, -50.0, 1.12815362653237725e-2),
    (0.5, 1.0, -1000.0, 5.641893014533876542e-4),
    (0.5, 1.0, 1.5, 1.8653886256262733939e+1),
    (0.5, 1.0, 6.0, 8.6224630942303903615e+15),
    (0.5, 0.5, -0.5, 2.5634441145129334951e-1),
    (0.5, 0.5, -2.0, 5.3398230926744799218e-2),
    (0.5, 0.5, -5.0, 1.0666394882413155097e-2),
    (0.5, 0.5, -12.0, 1.938931369031135513e-3),
    (0.5, 0.5, -30.0, 3.1291770525374203432e-4),
    (0.5, 0.5, -50.0, 1.1277028156766193889e-4),
    (0.5, 0.5, -1000.0, 2.8209436863274833442e-7),
    (0.5, 0.5, 1.5, 2.8545018967941857195e+1),
    (0.5, 0.5, 6.0, 5.1734778565382342733e+16),
    (0.5, -0.5, -0.5, -2.180086889110548061e-1),
    (0.5, -0.5, -2.0, -6.8501868066898946602e-2),
    (0.5, -0.5, -5.0, -1.5434919713549266049e-2),
    (0.5, -0.5, -12.0, -2.8886746333946295994e-3),
    (0.5, -0.5, -30.0, -4.6885704551031258642e-4),
    (0.5, -0.5, -50.0, -1.6908785472329625177e-4),
    (0.5, -0.5, -1000.0, -4.2314112980905054065e-7),
    (0.5, -0.5, 1.5, 6.3944197886095300545e+1),
    (0.5, -0.5, 6.0, 1.8624520283537643381e+18),
    (0.5, 0.5, -0.5, 2.5634441145129334951e-1),
    (0.5, 0.5, -2.0, 5.3398230926744799218e-2),
    (0.5, 0.5, -5.0, 1.0666394882413155097e-2),
    (0.5, 0.5, -12.0, 1.938931369031135513e-3),
    (0.5, 0.5, -30.0, 3.1291770525374203432e-4),
    (0.5, 0.5, -50.0, 1.1277028156766193889e-4),
    (0.5, 0.5, -1000.0, 2.8209436863274833442e-7),
    (0.5, 0.5, 1.5, 2.8545018967941857195e+1),
    (0.5, 0.5, 6.0, 5.1734778565382342733e+16),
    (0.5, 1.7, -0.5, 7.6879630372269152182e-1),
    (0.5, 1.7, -2.0, 3.8658168737812248728e-1),
    (0.5, 1.7, -5.0, 1.8905213968830384549e-1),
    (0.5, 1.7, -12.0, 8.5546896085515469257e-2),
    (0.5, 1.7, 1.5, 9.668586914452139634),
    (0.5, 1.7, 6.0, 7.0181006708652087497e+14),
    (0.8, 1.0, -0.5, 6.0302371586280369995e-1),
    (0.8, 1.0, -2.0, 1.8979669236370564843e-1),
    (0.8, 1.0, -5.0, 5.7595384762152244264e-2),
    (0.8, 1.0, -12.0, 2.0268165216948834128e-2),
    (0.8, 1.0, -30.0, 7.5758607992192086547e-3),
    (0.8, 1.0, -50.0, 4.4677761579029922645e-3),
    (0.8, 1.0, -1000.0, 2.180957552274838146e-4),
    (0.8, 1.0, 1.5, 6.4917408725519691925),
    (0.8, 1.0, 6.0, 1.4967687847947087637e+4),
    (0.8, 0.8, -0.5, 4.5793149810111440571e-1),
    (0.8, 0.8, -2.0, 9.2077465517931656239e-2),
    (0.8, 0.8, -5.0, 1.1828729724994501911e-2),
    (0.8, 0.8, -12.0, 1.5091599225381109734e-3),
    (0.8, 0.8, -30.0, 2.1082443010626105734e-4),
    (0.8, 0.8, -50.0, 7.3315313829055338196e-5),
    (0.8, 0.8, -1000.0, 1.7469360255448723797e-7),
    (0.8, 0.8, 1.5, 7.3018354284119862679),
    (0.8, 0.8, 6.0, 2.3425748108624032606e+4),
    (0.8, -0.19999999999999996, -0.5, -3.1361930209623106531e-1),
    (0.8, -0.19999999999999996, -2.0, -1.5487263321270663436e-1),
    (0.8, -0.19999999999999996, -5.0, -2.5497160409174344377e-2),
    (0.8, -0.19999999999999996, -12.0, -2.996977138495790566e-3),
    (0.8, -0.19999999999999996, -30.0, -3.9422963320453263387e-4),
    (0.8, -0.19999999999999996, -50.0, -1.3497951886355468034e-4),
    (0.8, -0.19999999999999996, -1000.0, -3.147961650703104716e-7),
    (0.8, -0.19999999999999996, 1.5, 1.2046360957659014335e+1),
    (0.8, -0.19999999999999996, 6.0, 2.1997962598981662411e+5),
    (0.8, 0.5, -0.5, 1.9021867180089233753e-1),
    (0.8, 0.5, -2.0, -5.5643228135738000241e-2),
    (0.8, 0.5, -5.0, -4.5884999529087700036e-2),
    (0.8, 0.5, -12.0, -1.9800411271027934197e-2),
    (0.8, 0.5, -30.0, -7.8100553206773827235e-3),
    (0.8, 0.5, -50.0, -4.6618510769924456434e-3),
    (0.8, 0.5, -1000.0, -2.3121770999711152448e-4),
    (0.8, 0.5, 1.5, 8.580683453034634401),
    (0.8, 0.5, 6.0, 4.5867013173438643701e+4),
    (0.8, 1.7, -0.5, 8.018787393845839281e-1),
    (0.8, 1.7, -2.0, 3.968825721314535612e-1),
    (0.8, 1.7, -5.0, 1.802478694314329816e-1),
    (0.8, 1.7, -12.0, 7.709290758416175197e-2),
    (0.8, 1.7, -30.0, 3.1066613071199942134e-2),
    (0.8, 1.7, -50.0, 1.8671587056784231143e-2),
    (0.8, 1.7, -1000.0, 9.3567337279750084843e-4),
    (0.8, 1.7, 1.5, 3.9712087743453895993),
    (0.8, 1.7, 6.0, 3.1206944952401456218e+3),
    (0.95, 1.0, -0.5, 6.0461402734213172616e-1),
    (0.95, 1.0, -2.0, 1.4962506184111460783e-1),
    (0.95, 1.0, -5.0, 2.126843729173112133e-2),
    (0.95, 1.0, -12.0, 5.1537977632854271844e-3),
    (0.95, 1.0, -30.0, 1.8277746789235517628e-3),
    (0.95, 1.0, -50.0, 1.0672340392208429699e-3),
    (0.95, 1.0, -1000.0, 5.1455699278570126974e-5),
    (0.95, 1.0, 1.5, 4.8554026260954400184),
    (0.95, 1.0, 6.0, 7.686543600587259846e+2),
    (0.95, 0.95, -0.5, 5.6928324669753812817e-1),
    (0.95, 0.95, -2.0, 1.2201317654626097287e-1),
    (0.95, 0.95, -5.0, 8.752856762023741451e-3),
    (0.95, 0.95, -12.0, 5.0423370080774671132e-4),
    (0.95, 0.95, -30.0, 6.19289011573174445e-5),
    (0.95, 0.95, -50.0, 2.1082326114074851819e-5),
    (0.95, 0.95, -1000.0, 4.8973269370596126695e-8),
    (0.95, 0.95, 1.5, 4.9839340060097132263),
    (0.95, 0.95, 6.0, 8.4467694578546212814e+2),
    (0.95, -0.050000000000000044, -0.5, -3.1422724486164905499e-1),
    (0.95, -0.050000000000000044, -2.0, -2.3598295008495746544e-1),
    (0.95, -0.050000000000000044, -5.0, -3.0927309945730247783e-2),
    (0.95, -0.050000000000000044, -12.0, -1.2509672988017315082e-3),
    (0.95, -0.050000000000000044, -30.0, -1.2929147081805742853e-4),
    (0.95, -0.050000000000000044, -50.0, -4.2731144534924008842e-5),
    (0.95, -0.050000000000000044, -1000.0, -9.5670010983936153687e-8),
    (0.95, -0.050000000000000044, 1.5, 7.6203279726846045528),
    (0.95, -0.050000000000000044, 6.0, 5.5692495804002931651e+3),
    (0.95, 0.5, -0.5, 1.6294187642891827804e-1),
    (0.95, 0.5, -2.0, -1.2932127332886481284e-1),
    (0.95, 0.5, -5.0, -7.7150393791918789873e-2),
    (0.95, 0.5, -12.0, -2.643356273668473221e-2),
    (0.95, 0.5, -30.0, -9.7321796110901061561e-3),
    (0.95, 0.5, -50.0, -5.7261029197878838267e-3),
    (0.95, 0.5, -1000.0, -2.7882078138958541829e-4),
    (0.95, 0.5, 1.5, 6.1406331115481632163),
    (0.95, 0.5, 6.0, 1.9737704667314509538e+3),
    (0.95, 1.7, -0.5, 8.2221123339455613861e-1),
    (0.95, 1.7, -2.0, 4.0448667506122261762e-1),
    (0.95, 1.7, -5.0, 1.7071559208930125462e-1),
    (0.95, 1.7, -12.0, 6.9297759500878778824e-2),
    (0.95, 1.7, -30.0, 2.7398528688403623168e-2),
    (0.95, 1.7, -50.0, 1.6390969806977360284e-2),
    (0.95, 1.7, -1000.0, 8.1622088177703753291e-4),
    (0.95, 1.7, 1.5, 3.1214647185004304442),
    (0.95, 1.7, 6.0, 2.0515462168800773924e+2),
];
