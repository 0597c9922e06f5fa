// criteria implementations land with the congruence layer
